#include "vawt/evolution.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace vawt {

namespace {

struct Individual {
    Genotype g;
    double fitness = 0;
    bool evaluated = false;  // scored by the real evaluator
};

std::vector<double> fitness_view(const std::vector<Individual>& pop) {
    std::vector<double> f(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) f[i] = pop[i].fitness;
    return f;
}

// Shared bookkeeping: eval counter, champion, log rows.
struct Recorder {
    explicit Recorder(const RunConfig& cfg)
        : writer(cfg.log_path.empty() ? RunLogWriter()
                                      : RunLogWriter(cfg.log_path, cfg.log_config)) {
        log.config = cfg.log_config;
    }

    void record(const Genotype& g, double fitness, int generation, int species,
                const Genotype* partner) {
        ++evals;
        if (fitness > log.champion_rpm || evals == 1) {
            log.champion_rpm = fitness;
            log.champion = g;
            if (partner)
                log.champion_partner = *partner;
            else
                log.champion_partner.reset();
        }
        best = std::max(best, fitness);
        writer.append({evals, generation, species, g, fitness, best});
    }

    RunLog finish() {
        log.rows = writer.rows();
        return std::move(log);
    }

    RunLogWriter writer;
    RunLog log;
    std::int64_t evals = 0;
    double best = 0;
};

std::size_t elite_index(const std::vector<Individual>& pop) {
    std::size_t best = pop.size();
    for (std::size_t i = 0; i < pop.size(); ++i) {
        if (!pop[i].evaluated) continue;
        if (best == pop.size() || pop[i].fitness > pop[best].fitness) best = i;
    }
    return best;  // pop.size() when nothing is real-evaluated
}

// Population members not yet really evaluated, in index order.
std::vector<std::size_t> unevaluated_indices(const std::vector<Individual>& pop) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pop.size(); ++i)
        if (!pop[i].evaluated) out.push_back(i);
    return out;
}

void check_budget(const RunConfig& cfg, int species_count) {
    long long floor = static_cast<long long>(cfg.params.population) * species_count;
    if (cfg.budget < floor)
        throw std::invalid_argument("budget must be at least " + std::to_string(floor));
}

}  // namespace

RunLog run_ga(const RunConfig& cfg, SingleEvaluator& evaluator) {
    check_budget(cfg, 1);
    Rng rng(cfg.seed);
    Recorder rec(cfg);
    const EngineParams& p = cfg.params;

    std::vector<Individual> pop(p.population);
    for (auto& ind : pop) ind.g = random_genotype(rng, cfg.genome_mode);
    for (auto& ind : pop) {
        ind.fitness = evaluator.evaluate(ind.g);
        ind.evaluated = true;
        rec.record(ind.g, ind.fitness, 0, 0, nullptr);
    }

    int generation = 0;
    while (rec.evals < cfg.budget) {
        ++generation;
        for (int j = 0; j < p.population && rec.evals < cfg.budget; ++j) {
            auto fitness = fitness_view(pop);
            std::size_t parent =
                tournament_select(fitness, rng, p.tournament_k, TournamentDirection::best);
            Genotype child = mutate(pop[parent].g, rng, p.mutation_rate, p.mutation_step);
            double f = evaluator.evaluate(child);
            rec.record(child, f, generation, 0, nullptr);
            std::size_t victim =
                tournament_select(fitness, rng, p.tournament_k, TournamentDirection::worst);
            pop[victim] = {child, f, true};
        }
    }
    return rec.finish();
}

RunLog run_sga(const RunConfig& cfg, SingleEvaluator& evaluator, const EngineHooks& hooks) {
    check_budget(cfg, 1);
    Rng rng(cfg.seed);
    Recorder rec(cfg);
    const EngineParams& p = cfg.params;

    std::vector<EvaluatedRecord> archive;
    std::unordered_map<std::string, double> archive_map;
    auto archive_add = [&](const Genotype& g, double f) {
        archive.push_back({g, f});
        archive_map.emplace(format_genotype(g), f);
    };

    std::vector<Individual> pop(p.population);
    for (auto& ind : pop) ind.g = random_genotype(rng, cfg.genome_mode);
    for (auto& ind : pop) {
        ind.fitness = evaluator.evaluate(ind.g);
        ind.evaluated = true;
        rec.record(ind.g, ind.fitness, 0, 0, nullptr);
        archive_add(ind.g, ind.fitness);
    }

    int generation = 0;
    for (int w = 0; w < p.warm_start_generations && rec.evals < cfg.budget; ++w) {
        ++generation;
        for (int j = 0; j < p.population && rec.evals < cfg.budget; ++j) {
            auto fitness = fitness_view(pop);
            std::size_t parent =
                tournament_select(fitness, rng, p.tournament_k, TournamentDirection::best);
            Genotype child = mutate(pop[parent].g, rng, p.mutation_rate, p.mutation_step);
            double f = evaluator.evaluate(child);
            rec.record(child, f, generation, 0, nullptr);
            archive_add(child, f);
            std::size_t victim =
                tournament_select(fitness, rng, p.tournament_k, TournamentDirection::worst);
            pop[victim] = {child, f, true};
        }
    }

    SurrogateModel model(input_width(cfg.genome_mode), p.hidden);
    model.reinitialize(rng);

    // Really evaluate population slot `idx`, archive and log the result.
    auto real_evaluate_slot = [&](std::size_t idx, int gen) {
        double f = evaluator.evaluate(pop[idx].g);
        pop[idx].fitness = f;
        pop[idx].evaluated = true;
        rec.record(pop[idx].g, f, gen, 0, nullptr);
        archive_add(pop[idx].g, f);
    };

    // Fallback when no unevaluated member exists: breed a fresh mutant of the
    // elite (preferring one not already archived), evaluate it for real and
    // insert it like any other offspring.
    auto evaluate_fresh_elite_mutant = [&](int gen) {
        std::size_t elite = elite_index(pop);
        Genotype base = elite < pop.size() ? pop[elite].g : rec.log.champion;
        Genotype child = mutate(base, rng, p.mutation_rate, p.mutation_step);
        for (int tries = 0; tries < 100 && archive_map.count(format_genotype(child)); ++tries)
            child = mutate(base, rng, p.mutation_rate, p.mutation_step);
        double f = evaluator.evaluate(child);
        rec.record(child, f, gen, 0, nullptr);
        archive_add(child, f);
        auto fitness = fitness_view(pop);
        std::size_t victim =
            tournament_select(fitness, rng, p.tournament_k, TournamentDirection::worst);
        pop[victim] = {child, f, true};
    };

    while (rec.evals < cfg.budget) {
        ++generation;
        if (hooks.on_train_begin) hooks.on_train_begin(0, model);
        model.train(archive, p.train_epochs, rng);
        for (auto& ind : pop)
            if (!ind.evaluated) ind.fitness = model.predict(ind.g);

        for (int j = 0; j < p.population; ++j) {
            auto fitness = fitness_view(pop);
            std::size_t parent =
                tournament_select(fitness, rng, p.tournament_k, TournamentDirection::best);
            Genotype child = mutate(pop[parent].g, rng, p.mutation_rate, p.mutation_step);
            Individual offspring{child, 0, false};
            if (auto it = archive_map.find(format_genotype(child)); it != archive_map.end()) {
                offspring.fitness = it->second;
                offspring.evaluated = true;
            } else {
                offspring.fitness = model.predict(child);
            }
            std::size_t victim =
                tournament_select(fitness, rng, p.tournament_k, TournamentDirection::worst);
            pop[victim] = offspring;
        }

        auto pending = unevaluated_indices(pop);
        if (pending.empty()) {
            evaluate_fresh_elite_mutant(generation);
        } else {
            std::size_t best_pick = pending[0];
            for (std::size_t idx : pending)
                if (pop[idx].fitness > pop[best_pick].fitness) best_pick = idx;
            real_evaluate_slot(best_pick, generation);
        }
        if (rec.evals >= cfg.budget) break;

        auto remaining = unevaluated_indices(pop);
        if (remaining.empty())
            evaluate_fresh_elite_mutant(generation);
        else
            real_evaluate_slot(remaining[rng.bounded(remaining.size())], generation);
    }
    return rec.finish();
}

ArraySeeds seed_array_populations(const std::vector<RunLogRow>& single_run_rows, int population) {
    std::vector<Genotype> picks;
    std::unordered_set<std::string> seen;
    int wanted = population / 2;
    for (const auto& row : single_run_rows) {
        if (row.fitness_rpm <= 0) continue;
        Genotype g = row.genotype;
        if (!g.z) g.z = std::array<int, kZGenes>{};  // promote flat genomes: identity transform
        g.rotation.reset();
        if (!seen.insert(format_genotype(g)).second) continue;
        picks.push_back(g);
        if (static_cast<int>(picks.size()) == wanted) break;
    }
    if (static_cast<int>(picks.size()) < wanted)
        throw std::runtime_error("seeding needs " + std::to_string(wanted) +
                                 " distinct positive-fitness individuals, found " +
                                 std::to_string(picks.size()));
    ArraySeeds seeds;
    std::vector<Genotype> members;
    for (const auto& g : picks)
        for (bool rot : {false, true}) {
            Genotype m = g;
            m.rotation = rot;
            members.push_back(m);
        }
    seeds.species[0] = members;
    seeds.species[1] = members;
    return seeds;
}

namespace {

struct PairContext {
    PairEvaluator& evaluator;
    Recorder& rec;

    // West slot is species 0. Returns the aggregate credited to the evaluated
    // individual.
    double evaluate(int species, const Genotype& member, const Genotype& partner, int generation) {
        const Genotype& west = species == 0 ? member : partner;
        const Genotype& east = species == 0 ? partner : member;
        FitnessResult res = evaluator.evaluate(west, east);
        rec.record(member, res.rpm, generation, species, &partner);
        return res.rpm;
    }
};

std::array<std::vector<Individual>, 2> init_pair_populations(const RunConfig& cfg, Rng& rng,
                                                             const std::optional<ArraySeeds>& seeds) {
    std::array<std::vector<Individual>, 2> pops;
    for (int s = 0; s < 2; ++s) {
        if (seeds) {
            const auto& members = seeds->species[s];
            if (static_cast<int>(members.size()) != cfg.params.population)
                throw std::invalid_argument("seeded population must have " +
                                            std::to_string(cfg.params.population) + " members");
            for (const auto& g : members) pops[s].push_back({g, 0, false});
        } else {
            for (int i = 0; i < cfg.params.population; ++i)
                pops[s].push_back({random_genotype(rng, GenomeMode::array), 0, false});
        }
    }
    return pops;
}

// Every member scored against a random partner from the other species.
void evaluate_initial_pairs(std::array<std::vector<Individual>, 2>& pops, Rng& rng,
                            PairContext& ctx) {
    for (int s = 0; s < 2; ++s)
        for (auto& ind : pops[s]) {
            const auto& partners = pops[1 - s];
            const Genotype& partner = partners[rng.bounded(partners.size())].g;
            ind.fitness = ctx.evaluate(s, ind.g, partner, 0);
            ind.evaluated = true;
        }
}

const Genotype& partner_elite(const std::vector<Individual>& partner_pop,
                              const std::vector<EvaluatedRecord>* partner_archive,
                              const RunLog& log, std::size_t* index_out) {
    std::size_t e = elite_index(partner_pop);
    if (e < partner_pop.size()) {
        if (index_out) *index_out = e;
        return partner_pop[e].g;
    }
    // No real-evaluated member left (possible after surrogate replacements):
    // fall back to the best archived genotype of that species.
    if (partner_archive && !partner_archive->empty()) {
        const EvaluatedRecord* best = &partner_archive->front();
        for (const auto& r : *partner_archive)
            if (r.real_fitness > best->real_fitness) best = &r;
        if (index_out) *index_out = partner_pop.size();
        return best->genotype;
    }
    return log.champion;
}

}  // namespace

RunLog run_cga(const RunConfig& cfg, PairEvaluator& evaluator,
               const std::optional<ArraySeeds>& seeds, const EngineHooks& hooks) {
    check_budget(cfg, 2);
    Rng rng(cfg.seed);
    Recorder rec(cfg);
    const EngineParams& p = cfg.params;
    PairContext ctx{evaluator, rec};

    auto pops = init_pair_populations(cfg, rng, seeds);
    evaluate_initial_pairs(pops, rng, ctx);

    std::int64_t offspring = 0;
    while (rec.evals < cfg.budget) {
        int s = static_cast<int>(offspring % 2);
        int generation = 1 + static_cast<int>(offspring / (2 * p.population));
        auto fitness = fitness_view(pops[s]);
        std::size_t parent =
            tournament_select(fitness, rng, p.tournament_k, TournamentDirection::best);
        Genotype child = mutate(pops[s][parent].g, rng, p.mutation_rate, p.mutation_step);
        std::size_t elite = 0;
        const Genotype& partner = partner_elite(pops[1 - s], nullptr, rec.log, &elite);
        if (hooks.on_pair_eval) hooks.on_pair_eval(s, elite);
        double f = ctx.evaluate(s, child, partner, generation);
        std::size_t victim =
            tournament_select(fitness, rng, p.tournament_k, TournamentDirection::worst);
        pops[s][victim] = {child, f, true};
        ++offspring;
    }
    return rec.finish();
}

RunLog run_scga(const RunConfig& cfg, PairEvaluator& evaluator,
                const std::optional<ArraySeeds>& seeds, const EngineHooks& hooks) {
    check_budget(cfg, 2);
    Rng rng(cfg.seed);
    Recorder rec(cfg);
    const EngineParams& p = cfg.params;
    PairContext ctx{evaluator, rec};

    std::array<std::vector<EvaluatedRecord>, 2> archive;
    std::array<std::unordered_map<std::string, double>, 2> archive_map;
    auto archive_add = [&](int s, const Genotype& g, double f) {
        archive[s].push_back({g, f});
        archive_map[s].emplace(format_genotype(g), f);
    };

    auto pops = init_pair_populations(cfg, rng, seeds);
    for (int s = 0; s < 2; ++s)
        for (auto& ind : pops[s]) {
            const auto& partners = pops[1 - s];
            const Genotype& partner = partners[rng.bounded(partners.size())].g;
            ind.fitness = ctx.evaluate(s, ind.g, partner, 0);
            ind.evaluated = true;
            archive_add(s, ind.g, ind.fitness);
        }

    std::array<SurrogateModel, 2> models{SurrogateModel(input_width(GenomeMode::array), p.hidden),
                                         SurrogateModel(input_width(GenomeMode::array), p.hidden)};

    auto real_evaluate_slot = [&](int s, std::size_t idx, int gen) {
        std::size_t elite = 0;
        const Genotype& partner = partner_elite(pops[1 - s], &archive[1 - s], rec.log, &elite);
        if (hooks.on_pair_eval) hooks.on_pair_eval(s, elite);
        double f = ctx.evaluate(s, pops[s][idx].g, partner, gen);
        pops[s][idx].fitness = f;
        pops[s][idx].evaluated = true;
        archive_add(s, pops[s][idx].g, f);
    };

    auto evaluate_fresh_elite_mutant = [&](int s, int gen) {
        std::size_t own_elite = elite_index(pops[s]);
        Genotype base;
        if (own_elite < pops[s].size()) {
            base = pops[s][own_elite].g;
        } else {
            const EvaluatedRecord* best = &archive[s].front();
            for (const auto& r : archive[s])
                if (r.real_fitness > best->real_fitness) best = &r;
            base = best->genotype;
        }
        Genotype child = mutate(base, rng, p.mutation_rate, p.mutation_step);
        for (int tries = 0; tries < 100 && archive_map[s].count(format_genotype(child)); ++tries)
            child = mutate(base, rng, p.mutation_rate, p.mutation_step);
        std::size_t elite = 0;
        const Genotype& partner = partner_elite(pops[1 - s], &archive[1 - s], rec.log, &elite);
        if (hooks.on_pair_eval) hooks.on_pair_eval(s, elite);
        double f = ctx.evaluate(s, child, partner, gen);
        archive_add(s, child, f);
        auto fitness = fitness_view(pops[s]);
        std::size_t victim =
            tournament_select(fitness, rng, p.tournament_k, TournamentDirection::worst);
        pops[s][victim] = {child, f, true};
    };

    int generation = 0;
    while (rec.evals < cfg.budget) {
        ++generation;
        for (int s = 0; s < 2 && rec.evals < cfg.budget; ++s) {
            models[s].reinitialize(rng);
            if (hooks.on_train_begin) hooks.on_train_begin(s, models[s]);
            models[s].train(archive[s], p.train_epochs, rng);
            for (auto& ind : pops[s])
                if (!ind.evaluated) ind.fitness = models[s].predict(ind.g);

            for (int j = 0; j < p.population; ++j) {
                auto fitness = fitness_view(pops[s]);
                std::size_t parent =
                    tournament_select(fitness, rng, p.tournament_k, TournamentDirection::best);
                Genotype child = mutate(pops[s][parent].g, rng, p.mutation_rate, p.mutation_step);
                Individual offspring{child, 0, false};
                if (auto it = archive_map[s].find(format_genotype(child));
                    it != archive_map[s].end()) {
                    offspring.fitness = it->second;
                    offspring.evaluated = true;
                } else {
                    offspring.fitness = models[s].predict(child);
                }
                std::size_t victim =
                    tournament_select(fitness, rng, p.tournament_k, TournamentDirection::worst);
                pops[s][victim] = offspring;
            }

            auto pending = unevaluated_indices(pops[s]);
            if (pending.empty()) {
                evaluate_fresh_elite_mutant(s, generation);
            } else {
                std::size_t best_pick = pending[0];
                for (std::size_t idx : pending)
                    if (pops[s][idx].fitness > pops[s][best_pick].fitness) best_pick = idx;
                real_evaluate_slot(s, best_pick, generation);
            }
            if (rec.evals >= cfg.budget) break;

            auto remaining = unevaluated_indices(pops[s]);
            if (remaining.empty())
                evaluate_fresh_elite_mutant(s, generation);
            else
                real_evaluate_slot(s, remaining[rng.bounded(remaining.size())], generation);
        }
    }
    return rec.finish();
}

}  // namespace vawt
