#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include "vawt/genome.hpp"

namespace vawt {

struct EvaluatedRecord {
    Genotype genotype;
    double real_fitness = 0;  // rpm, >= 0
};

// xy -> (a-1)/41, z -> (z+42)/84, rotation -> 0/1.
std::vector<double> normalize(const Genotype& g);

int input_width(GenomeMode mode);  // 10 / 15 / 16

// Fully connected 1-hidden-layer sigmoid network trained by stochastic
// backpropagation. Targets are min-max normalized over the records given to
// train(); predictions are rescaled back to rpm with the same bounds.
class SurrogateModel {
public:
    explicit SurrogateModel(int input_width, int hidden = 15);

    static constexpr double kBeta = 0.3;       // learning rate
    static constexpr double kTheta = 0.0;      // initial bias
    static constexpr double kMomentum = 0.0;

    // weights <- U[-0.5, 0.5], biases <- theta
    void reinitialize(Rng& rng);

    // `epochs` full passes; each epoch visits every record exactly once in a
    // freshly shuffled order, one gradient step per visit. `on_sample` is a
    // test hook receiving the record index of every step.
    void train(const std::vector<EvaluatedRecord>& records, int epochs, Rng& rng,
               double beta = kBeta, const std::function<void(int)>& on_sample = {});

    double predict(const Genotype& g) const;          // rpm scale
    double forward_normalized(const std::vector<double>& x) const;  // raw sigmoid output

    // Max relative error between analytic and central-difference gradients
    // over every weight and bias, for one (input, target) pair in [0,1] units.
    double gradient_check(const std::vector<double>& x, double target, double h = 1e-5) const;

    void save(const std::filesystem::path& path) const;
    static SurrogateModel load(const std::filesystem::path& path);

    int input_width() const { return in_; }
    int hidden_width() const { return hidden_; }
    double fitness_lo() const { return fit_lo_; }
    double fitness_hi() const { return fit_hi_; }
    const std::vector<double>& weights1() const { return w1_; }
    const std::vector<double>& weights2() const { return w2_; }
    bool operator==(const SurrogateModel&) const = default;

private:
    void gradient(const std::vector<double>& x, double target, std::vector<double>& gw1,
                  std::vector<double>& gb1, std::vector<double>& gw2, double& gb2) const;
    void step(const std::vector<double>& x, double target, double beta);

    int in_;
    int hidden_;
    std::vector<double> w1_;  // hidden x in
    std::vector<double> b1_;  // hidden
    std::vector<double> w2_;  // hidden
    double b2_ = 0;
    double fit_lo_ = 0, fit_hi_ = 0;
};

}  // namespace vawt
