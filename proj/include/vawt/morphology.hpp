#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vawt/genome.hpp"

namespace vawt {

inline constexpr int kGridN = 100;           // voxels per axis
inline constexpr double kVoxelPitchMm = 0.3; // 30 mm workspace / 100
inline constexpr int kBladeCols = 50;        // columns per blade, 5 per gene
inline constexpr int kZSections = 6;

// z-section layer boundaries: [0,17),[17,33),[33,50),[50,67),[67,83),[83,100)
inline constexpr std::array<int, kZSections + 1> kSectionStart = {0, 17, 33, 50, 67, 83, 100};

struct VoxelGrid {
    // x + kGridN*(y + kGridN*z), one byte per cell
    std::vector<std::uint8_t> cells = std::vector<std::uint8_t>(kGridN * kGridN * kGridN, 0);

    bool at(int x, int y, int z) const {
        return cells[static_cast<std::size_t>(x + kGridN * (y + kGridN * z))] != 0;
    }
    void set(int x, int y, int z, bool v) {
        cells[static_cast<std::size_t>(x + kGridN * (y + kGridN * z))] = v ? 1 : 0;
    }
    bool in_bounds(int x, int y, int z) const {
        return x >= 0 && x < kGridN && y >= 0 && y < kGridN && z >= 0 && z < kGridN;
    }
    std::int64_t count_filled() const;
    bool operator==(const VoxelGrid&) const = default;
};

using Layer = std::array<std::uint8_t, kGridN * kGridN>;  // x + kGridN*y

// Per blade column, the filled vertical half-open interval [lo, hi).
struct BladeProfile {
    std::array<int, kBladeCols> lo{};
    std::array<int, kBladeCols> hi{};
};

// Gene-by-gene interval rules; each gene governs 5 consecutive columns.
BladeProfile translate_profile(const std::array<int, kXyGenes>& xy);

// One z-layer: NE-quadrant blade from the profile, three 90-degree rotated
// copies, then the central platform ring (interior kept empty).
Layer build_layer(const std::array<int, kXyGenes>& xy);

// Platform ring only (the blade-free layer); also used by tests and docs.
Layer platform_layer();

// clamp(allele + z, 1, 42) for every allele.
std::array<int, kXyGenes> apply_z_transform(const std::array<int, kXyGenes>& xy, int z_allele);

VoxelGrid build_grid(const Genotype& g);

VoxelGrid mirror_x(const VoxelGrid& grid);

// Text dump, one 0/1 bitmap per layer.
std::string dump_voxels(const VoxelGrid& grid);

}  // namespace vawt
