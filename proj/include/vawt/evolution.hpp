#pragma once

#include <array>
#include <functional>
#include <optional>

#include "vawt/oracle.hpp"
#include "vawt/runlog.hpp"
#include "vawt/surrogate.hpp"

namespace vawt {

struct EngineParams {
    int population = 20;
    int tournament_k = 3;
    double mutation_rate = 0.25;
    int mutation_step = 10;
    double crossover_rate = 0.0;  // toggle exists, default off; no operator wired in
    int train_epochs = 1000;
    int hidden = 15;
    int warm_start_generations = 0;  // sga: plain-GA generations before the model is used
};

struct RunConfig {
    long long budget = 100;  // max real evaluations, >= population per species
    std::uint64_t seed = 1;
    GenomeMode genome_mode = GenomeMode::z_varying;  // single-turbine engines
    EngineParams params;
    std::filesystem::path log_path;                 // empty: in-memory log only
    std::map<std::string, std::string> log_config;  // resolved config, written verbatim
};

struct EngineHooks {
    // after weight (re)initialization, before training starts
    std::function<void(int species, const SurrogateModel& model)> on_train_begin;
    // before every post-init pair evaluation: which partner member was the elite
    std::function<void(int species, std::size_t partner_elite_index)> on_pair_eval;
};

// Steady state: parent by tournament(best), mutate, evaluate, insert over a
// tournament(worst) victim. One generation = `population` offspring.
RunLog run_ga(const RunConfig& cfg, SingleEvaluator& evaluator);

// As run_ga, but after the fully evaluated initial population each generation
// retrains the model on the archive (no weight reset), scores offspring by
// prediction (archived genotypes keep their real fitness), then really
// evaluates the best-predicted unevaluated member plus one random other
// unevaluated member: exactly 2 real evaluations per generation.
RunLog run_sga(const RunConfig& cfg, SingleEvaluator& evaluator, const EngineHooks& hooks = {});

struct ArraySeeds {
    std::array<std::vector<Genotype>, 2> species;
};

// First 10 distinct genotypes with positive fitness, in evaluation order, each
// duplicated with rotation false/true (flat genotypes get z=0,0,0,0,0); both
// species receive the same 20 members.
ArraySeeds seed_array_populations(const std::vector<RunLogRow>& single_run_rows,
                                  int population = 20);

// Two species, aggregate pair fitness credited to the evaluated individual.
// Initialization pairs every member with a random partner; afterwards species
// alternate one offspring at a time, each scored against the partner's elite.
RunLog run_cga(const RunConfig& cfg, PairEvaluator& evaluator,
               const std::optional<ArraySeeds>& seeds = {}, const EngineHooks& hooks = {});

// run_cga plus a per-species surrogate: every generation and species, reinitialize
// weights, retrain on the species archive, refresh predictions, breed a full
// population of offspring, then really evaluate best-predicted + random
// unevaluated (2 per species per generation).
RunLog run_scga(const RunConfig& cfg, PairEvaluator& evaluator,
                const std::optional<ArraySeeds>& seeds = {}, const EngineHooks& hooks = {});

}  // namespace vawt
