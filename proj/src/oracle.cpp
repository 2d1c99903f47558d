#include "vawt/oracle.hpp"

#include <algorithm>
#include <cstdint>

namespace vawt {

namespace {

// Torque accumulation with integer lever arms: lever(x) = x - 49.5, tracked as
// lever2(x) = 2x - 99 so the sums stay in int64 and parallel reduction is
// bit-identical to the serial loop. Columns in [gap_lo, gap_hi) use v_gap, the
// rest v0; the two buckets are merged before the float multiply when the
// speeds are equal so a vanishing gap term is exactly the uniform-wind result.
struct TorqueAccum {
    std::int64_t lever2_base = 0;
    std::int64_t lever2_gap = 0;
    std::int64_t mass = 0;
};

TorqueAccum scan_grid(const VoxelGrid& grid, int gap_lo, int gap_hi) {
    std::int64_t base = 0, gap = 0, mass = 0;
#pragma omp parallel for schedule(static) reduction(+ : base, gap, mass)
    for (int z = 0; z < kGridN; ++z) {
        for (int x = 0; x < kGridN; ++x) {
            bool in_gap = x >= gap_lo && x < gap_hi;
            for (int y = 0; y < kGridN; ++y) {
                if (!grid.at(x, y, z)) continue;
                std::int64_t lever2 = 2 * x - (kGridN - 1);
                if (in_gap)
                    gap += lever2;
                else
                    base += lever2;
                break;  // first hit only; mass counted separately below
            }
        }
        for (int x = 0; x < kGridN; ++x)
            for (int y = 0; y < kGridN; ++y)
                if (grid.at(x, y, z)) ++mass;
    }
    return {base, gap, mass};
}

double rpm_from(const TorqueAccum& acc, int spin, double v_base, double v_gap) {
    double torque;
    if (v_gap == v_base)
        torque = 0.5 * static_cast<double>(acc.lever2_base + acc.lever2_gap) * v_base * v_base;
    else
        torque = 0.5 * (static_cast<double>(acc.lever2_base) * v_base * v_base +
                        static_cast<double>(acc.lever2_gap) * v_gap * v_gap);
    double driven = std::max(0.0, spin * torque);
    return kRpmCalibration * driven / static_cast<double>(acc.mass + 1);
}

double gap_side_fill(const VoxelGrid& grid, int col_lo, int col_hi) {
    std::int64_t filled = 0;
#pragma omp parallel for schedule(static) reduction(+ : filled)
    for (int z = 0; z < kGridN; ++z)
        for (int y = 0; y < kGridN; ++y)
            for (int x = col_lo; x < col_hi; ++x)
                if (grid.at(x, y, z)) ++filled;
    return static_cast<double>(filled) /
           (static_cast<double>(col_hi - col_lo) * kGridN * kGridN);
}

}  // namespace

FitnessResult sim_single(const VoxelGrid& grid, int spin, const WindSetup& wind) {
    TorqueAccum acc = scan_grid(grid, 0, 0);
    double rpm = rpm_from(acc, spin, wind.v0, wind.v0);
    return {rpm, {rpm}};
}

FitnessResult sim_pair(const VoxelGrid& grid_a, int spin_a, const VoxelGrid& grid_b, int spin_b,
                       const WindSetup& wind) {
    int gs = wind.gap_side_cols;
    // A sits west: its gap side is its east edge. B sits east: west edge.
    double fill_a = gap_side_fill(grid_a, kGridN - gs, kGridN);
    double fill_b = gap_side_fill(grid_b, 0, gs);
    double v_gap_a = wind.v0 * (1.0 + wind.gamma * fill_b);
    double v_gap_b = wind.v0 * (1.0 + wind.gamma * fill_a);

    TorqueAccum acc_a = scan_grid(grid_a, kGridN - gs, kGridN);
    TorqueAccum acc_b = scan_grid(grid_b, 0, gs);
    double rpm_a = rpm_from(acc_a, spin_a, wind.v0, v_gap_a);
    double rpm_b = rpm_from(acc_b, spin_b, wind.v0, v_gap_b);
    return {rpm_a + rpm_b, {rpm_a, rpm_b}};
}

}  // namespace vawt
