#include "vawt/serial_ref.hpp"

#include <algorithm>
#include <cstring>

namespace vawt::serial {

VoxelGrid build_grid(const Genotype& g) {
    require_valid(g);
    std::array<int, kXyGenes> xy = g.xy;
    VoxelGrid grid;
    for (int s = 0; s < kZSections; ++s) {
        if (s > 0) xy = g.z ? apply_z_transform(xy, (*g.z)[s - 1]) : xy;
        Layer layer = build_layer(xy);
        for (int z = kSectionStart[s]; z < kSectionStart[s + 1]; ++z)
            std::memcpy(grid.cells.data() + static_cast<std::size_t>(z) * kGridN * kGridN,
                        layer.data(), kGridN * kGridN);
    }
    if (g.rotation && *g.rotation) {
        VoxelGrid mirrored;
        for (int z = 0; z < kGridN; ++z)
            for (int y = 0; y < kGridN; ++y)
                for (int x = 0; x < kGridN; ++x)
                    mirrored.set(kGridN - 1 - x, y, z, grid.at(x, y, z));
        grid = mirrored;
    }
    return grid;
}

namespace {

struct Accum {
    std::int64_t base = 0, gap = 0, mass = 0;
};

Accum scan(const VoxelGrid& grid, int gap_lo, int gap_hi) {
    Accum acc;
    for (int z = 0; z < kGridN; ++z) {
        for (int x = 0; x < kGridN; ++x) {
            for (int y = 0; y < kGridN; ++y) {
                if (!grid.at(x, y, z)) continue;
                std::int64_t lever2 = 2 * x - (kGridN - 1);
                if (x >= gap_lo && x < gap_hi)
                    acc.gap += lever2;
                else
                    acc.base += lever2;
                break;
            }
        }
        for (int x = 0; x < kGridN; ++x)
            for (int y = 0; y < kGridN; ++y)
                if (grid.at(x, y, z)) ++acc.mass;
    }
    return acc;
}

double rpm_of(const Accum& acc, int spin, double v_base, double v_gap) {
    double torque;
    if (v_gap == v_base)
        torque = 0.5 * static_cast<double>(acc.base + acc.gap) * v_base * v_base;
    else
        torque = 0.5 * (static_cast<double>(acc.base) * v_base * v_base +
                        static_cast<double>(acc.gap) * v_gap * v_gap);
    return kRpmCalibration * std::max(0.0, spin * torque) / static_cast<double>(acc.mass + 1);
}

double fill_fraction(const VoxelGrid& grid, int col_lo, int col_hi) {
    std::int64_t filled = 0;
    for (int z = 0; z < kGridN; ++z)
        for (int y = 0; y < kGridN; ++y)
            for (int x = col_lo; x < col_hi; ++x)
                if (grid.at(x, y, z)) ++filled;
    return static_cast<double>(filled) /
           (static_cast<double>(col_hi - col_lo) * kGridN * kGridN);
}

}  // namespace

FitnessResult sim_single(const VoxelGrid& grid, int spin, const WindSetup& wind) {
    Accum acc = scan(grid, 0, 0);
    double rpm = rpm_of(acc, spin, wind.v0, wind.v0);
    return {rpm, {rpm}};
}

FitnessResult sim_pair(const VoxelGrid& grid_a, int spin_a, const VoxelGrid& grid_b, int spin_b,
                       const WindSetup& wind) {
    int gs = wind.gap_side_cols;
    double fill_a = fill_fraction(grid_a, kGridN - gs, kGridN);
    double fill_b = fill_fraction(grid_b, 0, gs);
    double v_gap_a = wind.v0 * (1.0 + wind.gamma * fill_b);
    double v_gap_b = wind.v0 * (1.0 + wind.gamma * fill_a);
    Accum acc_a = scan(grid_a, kGridN - gs, kGridN);
    Accum acc_b = scan(grid_b, 0, gs);
    double rpm_a = rpm_of(acc_a, spin_a, wind.v0, v_gap_a);
    double rpm_b = rpm_of(acc_b, spin_b, wind.v0, v_gap_b);
    return {rpm_a + rpm_b, {rpm_a, rpm_b}};
}

TriMesh smooth(const TriMesh& mesh, int steps) {
    TriMesh out = mesh;
    if (steps <= 0 || mesh.vertices.empty()) return out;
    auto adj = vertex_adjacency(mesh);
    std::vector<std::array<double, 3>> next(out.vertices.size());
    for (int step = 0; step < steps; ++step) {
        const auto& cur = out.vertices;
        for (std::size_t v = 0; v < cur.size(); ++v) {
            const auto& n = adj[v];
            if (n.empty()) {
                next[v] = cur[v];
                continue;
            }
            double sx = 0, sy = 0, sz = 0;
            for (std::uint32_t w : n) {
                sx += cur[w][0];
                sy += cur[w][1];
                sz += cur[w][2];
            }
            double inv = 1.0 / static_cast<double>(n.size());
            next[v] = {sx * inv, sy * inv, sz * inv};
        }
        out.vertices.swap(next);
    }
    return out;
}

}  // namespace vawt::serial
