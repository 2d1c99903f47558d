#pragma once

#include <chrono>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vawt/oracle.hpp"
#include "vawt/stl_io.hpp"

namespace vawt {

struct HwTimeoutError : std::runtime_error {
    HwTimeoutError(std::vector<std::string> missing_ids, const std::string& what)
        : std::runtime_error(what), missing(std::move(missing_ids)) {}
    std::vector<std::string> missing;
};

struct HwProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File-exchange evaluation: meshes are written as <id>.stl into the exchange
// directory, manifest.csv gets one `id,stl_path,pending` row per mesh, and the
// evaluator polls results.csv until every id has a `id,rpm` row. One evaluator
// instance per directory, enforced with flock on <dir>/.lock.
class HwExchange {
public:
    explicit HwExchange(std::filesystem::path dir,
                        std::chrono::milliseconds poll = std::chrono::milliseconds(50),
                        std::chrono::milliseconds timeout = std::chrono::milliseconds(60000));
    ~HwExchange();
    HwExchange(const HwExchange&) = delete;
    HwExchange& operator=(const HwExchange&) = delete;

    std::vector<std::pair<std::string, double>> evaluate(
        const std::vector<std::pair<std::string, TriMesh>>& batch);

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    std::chrono::milliseconds poll_;
    std::chrono::milliseconds timeout_;
    int lock_fd_ = -1;
};

// Genotype -> grid -> smoothed mesh -> exchange round trip, one id per real
// evaluation ("e<eval>", pairs add "_a"/"_b").
class HwSingleEvaluator : public SingleEvaluator {
public:
    HwSingleEvaluator(HwExchange& exchange, int smooth_steps = 50)
        : exchange_(exchange), smooth_steps_(smooth_steps) {}
    double evaluate(const Genotype& g) override;

private:
    HwExchange& exchange_;
    int smooth_steps_;
    long counter_ = 0;
};

class HwPairEvaluator : public PairEvaluator {
public:
    HwPairEvaluator(HwExchange& exchange, int smooth_steps = 50)
        : exchange_(exchange), smooth_steps_(smooth_steps) {}
    FitnessResult evaluate(const Genotype& west, const Genotype& east) override;

private:
    HwExchange& exchange_;
    int smooth_steps_;
    long counter_ = 0;
};

}  // namespace vawt
