#pragma once

#include <vector>

#include "vawt/morphology.hpp"

namespace vawt {

// The simulated oracle is NOT an aerodynamic model. It is a deterministic,
// asymmetry-rewarding test function with turbine-like structure (drag
// differential proportional to exposed lever arms), built to exercise and
// compare the optimizers. See README for the full definition.
struct WindSetup {
    double v0 = 4.4;              // free-stream speed, m/s, blows along +y
    double gamma = 0.25;          // gap flow acceleration factor (pair mode)
    int gap_side_cols = 20;       // columns per turbine facing the gap
    int spacing_voxels = 110;     // lateral centre-to-centre distance
    double fan_distance_mm = 30;  // recorded metadata, no effect on the proxy
};

struct FitnessResult {
    double rpm = 0;                   // aggregate
    std::vector<double> per_turbine;  // one entry (single) or two (pair)
};

inline constexpr double kRpmCalibration = 5000;  // arbitrary, fixed

// For each z-layer and x-column, the first filled cell scanned from y=0 is
// exposed; it contributes lever(x) * v(x)^2 to the torque, lever measured from
// the grid centre x=49.5. rpm = C * max(0, spin*T) / (mass+1).
FitnessResult sim_single(const VoxelGrid& grid, int spin, const WindSetup& wind);

// Two turbines side by side, A west of B, 10 empty columns between the bands.
// Each turbine's own gap-side columns see v0*(1 + gamma*f_neighbor), where
// f_neighbor is the neighbour's filled fraction of its gap-side slab. Aggregate
// rpm is the sum; both are scored with sim_single arithmetic.
FitnessResult sim_pair(const VoxelGrid& grid_a, int spin_a, const VoxelGrid& grid_b, int spin_b,
                       const WindSetup& wind);

struct SingleEvaluator {
    virtual ~SingleEvaluator() = default;
    virtual double evaluate(const Genotype& g) = 0;
};

struct PairEvaluator {
    virtual ~PairEvaluator() = default;
    virtual FitnessResult evaluate(const Genotype& west, const Genotype& east) = 0;
};

class SimSingleEvaluator : public SingleEvaluator {
public:
    explicit SimSingleEvaluator(WindSetup wind = {}) : wind_(wind) {}
    double evaluate(const Genotype& g) override {
        return sim_single(build_grid(g), +1, wind_).rpm;
    }

private:
    WindSetup wind_;
};

class SimPairEvaluator : public PairEvaluator {
public:
    explicit SimPairEvaluator(WindSetup wind = {}) : wind_(wind) {}
    FitnessResult evaluate(const Genotype& west, const Genotype& east) override {
        return sim_pair(build_grid(west), +1, build_grid(east), +1, wind_);
    }

private:
    WindSetup wind_;
};

}  // namespace vawt
