#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vawt/rng.hpp"

namespace vawt {

inline constexpr int kXyGenes = 10;
inline constexpr int kZGenes = 5;
inline constexpr int kXyMin = 1;
inline constexpr int kXyMax = 42;
inline constexpr int kZMin = -42;
inline constexpr int kZMax = 42;

enum class GenomeMode { flat, z_varying, array };

// Design encoding: 10 blade-height genes, optionally 5 per-section height
// transforms, optionally a spin-direction bit (paired-turbine mode only).
struct Genotype {
    std::array<int, kXyGenes> xy{};
    std::optional<std::array<int, kZGenes>> z;
    std::optional<bool> rotation;

    GenomeMode mode() const {
        if (rotation.has_value()) return GenomeMode::array;
        return z.has_value() ? GenomeMode::z_varying : GenomeMode::flat;
    }
    bool operator==(const Genotype&) const = default;
};

struct GenomeParseError : std::runtime_error {
    GenomeParseError(std::size_t offset, const std::string& what)
        : std::runtime_error("genome parse error at column " + std::to_string(offset) +
                             ": " + what),
          offset(offset) {}
    std::size_t offset;
};

bool is_valid(const Genotype& g);
void require_valid(const Genotype& g);

Genotype random_genotype(Rng& rng, GenomeMode mode);

// Each allele independently mutates with probability `rate` by a nonzero step
// in [-max_step, max_step], clamped to its legal range; the rotation bit flips
// with the same probability.
Genotype mutate(const Genotype& g, Rng& rng, double rate = 0.25, int max_step = 10);

enum class TournamentDirection { best, worst };

// k entrants drawn uniformly with replacement; ties broken by lowest index.
std::size_t tournament_select(const std::vector<double>& fitness, Rng& rng, int k,
                              TournamentDirection direction);

// Text form: xy=2,2,3,4,5,8,13,20,34,40;z=2,-5,10,3,-2;rot=0 (z, rot optional).
std::string format_genotype(const Genotype& g);
Genotype parse_genotype(const std::string& text);

}  // namespace vawt
