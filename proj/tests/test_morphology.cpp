#include <algorithm>
#include <cstring>
#include <sstream>

#include "doctest.h"
#include "vawt/morphology.hpp"

using namespace vawt;

namespace {

std::array<int, kXyGenes> fill_xy(int v) {
    std::array<int, kXyGenes> xy;
    xy.fill(v);
    return xy;
}

bool layer_equals_grid_slice(const Layer& layer, const VoxelGrid& grid, int z) {
    return std::memcmp(layer.data(),
                       grid.cells.data() + static_cast<std::size_t>(z) * kGridN * kGridN,
                       layer.size()) == 0;
}

}  // namespace

TEST_CASE("profile intervals follow the gene-by-gene rules") {
    // Hand-traced: 5 -> [0,5); 8 >= prev hi 5 -> [3,8); 2 <= prev lo 3 -> [2,5);
    // 4 strictly inside (2,5) -> [2,4).
    std::array<int, kXyGenes> xy = {5, 8, 2, 4, 1, 1, 1, 1, 1, 1};
    BladeProfile p = translate_profile(xy);
    const int expect_lo[4] = {0, 3, 2, 2};
    const int expect_hi[4] = {5, 8, 5, 4};
    for (int g = 0; g < 4; ++g)
        for (int c = 5 * g; c < 5 * (g + 1); ++c) {
            CHECK(p.lo[c] == expect_lo[g]);
            CHECK(p.hi[c] == expect_hi[g]);
        }

    // All-ones: every gene re-enters the a >= prev_hi branch at the floor.
    BladeProfile ones = translate_profile(fill_xy(1));
    for (int c = 0; c < kBladeCols; ++c) {
        CHECK(ones.lo[c] == 0);
        CHECK(ones.hi[c] == 1);
    }

    // All-42: first gene spans [0,42), later genes ride the ceiling at [40,42).
    BladeProfile max = translate_profile(fill_xy(42));
    CHECK(max.lo[0] == 0);
    CHECK(max.hi[0] == 42);
    for (int c = 5; c < kBladeCols; ++c) {
        CHECK(max.lo[c] == 40);
        CHECK(max.hi[c] == 42);
    }

    CHECK_THROWS_AS(translate_profile(fill_xy(0)), std::invalid_argument);
    CHECK_THROWS_AS(translate_profile(fill_xy(43)), std::invalid_argument);
}

TEST_CASE("profile intervals are always within bounds and non-empty") {
    Rng rng(31);
    for (int trial = 0; trial < 500; ++trial) {
        Genotype g = random_genotype(rng, GenomeMode::flat);
        BladeProfile p = translate_profile(g.xy);
        for (int c = 0; c < kBladeCols; ++c) {
            CHECK(p.lo[c] >= 0);
            CHECK(p.hi[c] <= 42);
            CHECK(p.lo[c] < p.hi[c]);
        }
    }
}

TEST_CASE("z transform shifts and clamps every allele") {
    std::array<int, kXyGenes> xy = {2, 2, 3, 4, 5, 8, 13, 20, 34, 40};
    CHECK(apply_z_transform(xy, 2) ==
          std::array<int, kXyGenes>{4, 4, 5, 6, 7, 10, 15, 22, 36, 42});
    CHECK(apply_z_transform(xy, -5) ==
          std::array<int, kXyGenes>{1, 1, 1, 1, 1, 3, 8, 15, 29, 35});
    CHECK(apply_z_transform(xy, 0) == xy);
    CHECK(apply_z_transform(xy, 42) == fill_xy(42));
    CHECK(apply_z_transform(xy, -42) == fill_xy(1));
}

TEST_CASE("platform layer is the ring perimeter only") {
    Layer ring = platform_layer();
    int filled = 0;
    for (int y = 0; y < kGridN; ++y)
        for (int x = 0; x < kGridN; ++x) {
            bool on_ring = x >= 42 && x <= 57 && y >= 42 && y <= 57 &&
                           (x == 42 || x == 57 || y == 42 || y == 57);
            CHECK(static_cast<bool>(ring[x + kGridN * y]) == on_ring);
            filled += ring[x + kGridN * y];
        }
    CHECK(filled == 60);  // 16*16 - 14*14
}

TEST_CASE("layers carry four rotated blades around an open platform") {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        Genotype g = random_genotype(rng, GenomeMode::flat);
        Layer layer = build_layer(g.xy);

        // Quarter-turn symmetry about the centre voxel (50,50), valid outside
        // the platform window (the ring pivots about 49.5 and is exempt).
        for (int y = 1; y < kGridN; ++y)
            for (int x = 0; x < kGridN; ++x) {
                if (x >= 42 && x <= 57 && y >= 42 && y <= 58) continue;
                CHECK(layer[x + kGridN * y] == layer[(kGridN - y) + kGridN * x]);
            }

        // The rotation pivot leaves the west column and south row clear.
        for (int i = 0; i < kGridN; ++i) {
            CHECK(layer[0 + kGridN * i] == 0);
            CHECK(layer[i + kGridN * 0] == 0);
        }

        // Ring present, interior open regardless of the blade profile.
        Layer ring = platform_layer();
        for (std::size_t i = 0; i < layer.size(); ++i)
            if (ring[i]) CHECK(layer[i] == 1);
        for (int y = 43; y <= 56; ++y)
            for (int x = 43; x <= 56; ++x) CHECK(layer[x + kGridN * y] == 0);
    }
}

TEST_CASE("minimal blades give a hand-countable layer") {
    // All-ones profile. East blade: one row at y=50, x=50..99; x=50..56 fall in
    // the open platform interior, x=57 coincides with the ring, 42 cells left.
    // Its three rotated copies land on (50, 58..99), (1..41, 50), (50, 1..41):
    // 42 + 41 + 41 more. Plus the 60-cell ring: 226 total.
    Layer layer = build_layer(fill_xy(1));
    int filled = 0;
    for (std::uint8_t c : layer) filled += c;
    CHECK(filled == 226);
    for (int x = 58; x < kGridN; ++x) CHECK(layer[x + kGridN * 50] == 1);
    for (int y = 58; y < kGridN; ++y) CHECK(layer[50 + kGridN * y] == 1);
    for (int x = 1; x <= 41; ++x) CHECK(layer[x + kGridN * 50] == 1);
    for (int y = 1; y <= 41; ++y) CHECK(layer[50 + kGridN * y] == 1);
    CHECK(layer[50 + kGridN * 50] == 0);  // interior stays open
}

TEST_CASE("flat grids repeat one layer through all sections") {
    Genotype g;
    g.xy = {5, 8, 2, 4, 1, 7, 42, 30, 11, 9};
    VoxelGrid grid = build_grid(g);
    Layer layer = build_layer(g.xy);
    for (int z = 0; z < kGridN; ++z) CHECK(layer_equals_grid_slice(layer, grid, z));

    VoxelGrid ones = build_grid([] {
        Genotype h;
        h.xy.fill(1);
        return h;
    }());
    CHECK(ones.count_filled() == 226 * kGridN);
}

TEST_CASE("the documented height-transform chain reproduces its section genomes") {
    Genotype g;
    g.xy = {2, 2, 3, 4, 5, 8, 13, 20, 34, 40};
    g.z = std::array<int, kZGenes>{2, -5, 10, 3, -2};
    const std::array<std::array<int, kXyGenes>, kZSections> expect = {{
        {2, 2, 3, 4, 5, 8, 13, 20, 34, 40},
        {4, 4, 5, 6, 7, 10, 15, 22, 36, 42},
        {1, 1, 1, 1, 2, 5, 10, 17, 31, 37},
        {11, 11, 11, 11, 12, 15, 20, 27, 41, 42},
        {14, 14, 14, 14, 15, 18, 23, 30, 42, 42},
        {12, 12, 12, 12, 13, 16, 21, 28, 40, 40},
    }};
    std::array<int, kXyGenes> cur = g.xy;
    for (int s = 0; s < kZSections; ++s) {
        if (s > 0) cur = apply_z_transform(cur, (*g.z)[s - 1]);
        CHECK(cur == expect[s]);
    }
    VoxelGrid grid = build_grid(g);
    for (int s = 0; s < kZSections; ++s) {
        Layer layer = build_layer(expect[s]);
        CHECK(layer_equals_grid_slice(layer, grid, kSectionStart[s]));
    }
}

TEST_CASE("z genes accumulate section by section") {
    Genotype g;
    g.xy = {5, 8, 2, 4, 1, 7, 42, 30, 11, 9};
    g.z = std::array<int, kZGenes>{2, -5, 0, 10, -42};

    std::array<std::array<int, kXyGenes>, kZSections> sec;
    sec[0] = g.xy;
    for (int s = 1; s < kZSections; ++s) sec[s] = apply_z_transform(sec[s - 1], (*g.z)[s - 1]);
    CHECK(sec[3] == sec[2]);          // zero transform repeats the section
    CHECK(sec[5] == fill_xy(1));      // -42 slams everything to the floor

    VoxelGrid grid = build_grid(g);
    for (int s = 0; s < kZSections; ++s) {
        Layer layer = build_layer(sec[s]);
        CHECK(layer_equals_grid_slice(layer, grid, kSectionStart[s]));
        CHECK(layer_equals_grid_slice(layer, grid, kSectionStart[s + 1] - 1));
    }

    // A z-varying genome whose transforms are all zero matches the flat build.
    Genotype flat;
    flat.xy = g.xy;
    Genotype zeroz = flat;
    zeroz.z = std::array<int, kZGenes>{0, 0, 0, 0, 0};
    CHECK(build_grid(zeroz) == build_grid(flat));
}

TEST_CASE("mirroring is an involution and realizes the rotation bit") {
    Rng rng(41);
    Genotype g = random_genotype(rng, GenomeMode::z_varying);
    VoxelGrid grid = build_grid(g);
    CHECK(mirror_x(mirror_x(grid)) == grid);

    Genotype spun = g;
    spun.rotation = true;
    Genotype unspun = g;
    unspun.rotation = false;
    CHECK(build_grid(spun) == mirror_x(build_grid(unspun)));
    CHECK(build_grid(unspun) == grid);
}

TEST_CASE("voxel dump lists every layer as a bitmap") {
    Genotype g;
    g.xy.fill(1);
    VoxelGrid grid = build_grid(g);
    std::string dump = dump_voxels(grid);
    CHECK(dump.rfind("layer 0\n", 0) == 0);
    CHECK(dump.find("layer 99\n") != std::string::npos);
    CHECK(std::count(dump.begin(), dump.end(), '\n') == kGridN + kGridN * kGridN);
    // count bitmap ones only; "layer N" headers contain digit 1s of their own
    std::int64_t ones = 0;
    std::istringstream lines(dump);
    std::string line;
    while (std::getline(lines, line))
        if (line.rfind("layer ", 0) != 0) ones += std::count(line.begin(), line.end(), '1');
    CHECK(ones == grid.count_filled());
}

TEST_CASE("grid build rejects invalid genotypes") {
    Genotype g;
    g.xy.fill(0);
    CHECK_THROWS_AS(build_grid(g), std::invalid_argument);
}
