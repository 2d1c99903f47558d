#include "vawt/morphology.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>

namespace vawt {

std::int64_t VoxelGrid::count_filled() const {
    return std::accumulate(cells.begin(), cells.end(), std::int64_t{0});
}

BladeProfile translate_profile(const std::array<int, kXyGenes>& xy) {
    for (int a : xy)
        if (a < kXyMin || a > kXyMax)
            throw std::invalid_argument("profile allele out of range");
    BladeProfile p;
    int prev_lo = 0, prev_hi = 0;
    for (int i = 0; i < kXyGenes; ++i) {
        int a = xy[i];
        int lo, hi;
        if (i == 0) {
            lo = 0;
            hi = a;
        } else if (a >= prev_hi) {
            lo = std::max(0, prev_hi - 2);
            hi = a;
        } else if (a <= prev_lo) {
            lo = a;
            hi = std::min(kXyMax, prev_lo + 2);
        } else {
            lo = std::max(0, a - 2);
            hi = a;
        }
        for (int c = 5 * i; c < 5 * (i + 1); ++c) {
            p.lo[c] = lo;
            p.hi[c] = hi;
        }
        prev_lo = lo;
        prev_hi = hi;
    }
    return p;
}

namespace {

constexpr int kCenter = kGridN / 2;  // 50
// Platform ring: perimeter of [42,57]^2, interior [43,56]^2 (14x14) empty.
constexpr int kRingLo = 42, kRingHi = 57;

// Quarter turn about the centre voxel (50,50). Blade cells always land in
// bounds (profiles keep them off the y=0 row). The ring sits half a voxel off
// this pivot, so the full layer is 4-fold symmetric only outside the platform
// region; the resulting one-column bias is what gives designs a net torque.
inline void rotate90(int& x, int& y) {
    int nx = kGridN - y;
    int ny = x;
    x = nx;
    y = ny;
}

}  // namespace

Layer platform_layer() {
    Layer layer{};
    for (int i = kRingLo; i <= kRingHi; ++i) {
        layer[i + kGridN * kRingLo] = 1;
        layer[i + kGridN * kRingHi] = 1;
        layer[kRingLo + kGridN * i] = 1;
        layer[kRingHi + kGridN * i] = 1;
    }
    return layer;
}

Layer build_layer(const std::array<int, kXyGenes>& xy) {
    BladeProfile p = translate_profile(xy);
    Layer layer{};
    for (int c = 0; c < kBladeCols; ++c) {
        int x = kCenter + c;
        for (int y = kCenter + p.lo[c]; y < kCenter + p.hi[c]; ++y) {
            int rx = x, ry = y;
            for (int blade = 0; blade < 4; ++blade) {
                layer[rx + kGridN * ry] = 1;
                rotate90(rx, ry);
            }
        }
    }
    Layer ring = platform_layer();
    for (std::size_t i = 0; i < layer.size(); ++i) layer[i] |= ring[i];
    for (int y = kRingLo + 1; y < kRingHi; ++y)
        for (int x = kRingLo + 1; x < kRingHi; ++x) layer[x + kGridN * y] = 0;
    return layer;
}

std::array<int, kXyGenes> apply_z_transform(const std::array<int, kXyGenes>& xy, int z_allele) {
    std::array<int, kXyGenes> out;
    for (int i = 0; i < kXyGenes; ++i) out[i] = std::clamp(xy[i] + z_allele, kXyMin, kXyMax);
    return out;
}

VoxelGrid build_grid(const Genotype& g) {
    require_valid(g);
    std::array<std::array<int, kXyGenes>, kZSections> section_xy;
    section_xy[0] = g.xy;
    for (int s = 1; s < kZSections; ++s)
        section_xy[s] = g.z ? apply_z_transform(section_xy[s - 1], (*g.z)[s - 1])
                            : section_xy[0];

    std::array<Layer, kZSections> section_layer;
#pragma omp parallel for schedule(static)
    for (int s = 0; s < kZSections; ++s) section_layer[s] = build_layer(section_xy[s]);

    VoxelGrid grid;
#pragma omp parallel for schedule(static)
    for (int z = 0; z < kGridN; ++z) {
        int s = 0;
        while (z >= kSectionStart[s + 1]) ++s;
        std::memcpy(grid.cells.data() + static_cast<std::size_t>(z) * kGridN * kGridN,
                    section_layer[s].data(), kGridN * kGridN);
    }
    if (g.rotation && *g.rotation) grid = mirror_x(grid);
    return grid;
}

VoxelGrid mirror_x(const VoxelGrid& grid) {
    VoxelGrid out;
#pragma omp parallel for schedule(static)
    for (int z = 0; z < kGridN; ++z)
        for (int y = 0; y < kGridN; ++y)
            for (int x = 0; x < kGridN; ++x)
                out.set(kGridN - 1 - x, y, z, grid.at(x, y, z));
    return out;
}

std::string dump_voxels(const VoxelGrid& grid) {
    std::string out;
    out.reserve(static_cast<std::size_t>(kGridN) * kGridN * (kGridN + 1) + kGridN * 12);
    for (int z = 0; z < kGridN; ++z) {
        out += "layer " + std::to_string(z) + "\n";
        for (int y = 0; y < kGridN; ++y) {
            for (int x = 0; x < kGridN; ++x) out += grid.at(x, y, z) ? '1' : '0';
            out += '\n';
        }
    }
    return out;
}

}  // namespace vawt
