#include "vawt/cli.hpp"

#include <exception>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "vawt/evolution.hpp"
#include "vawt/hw_exchange.hpp"
#include "vawt/serial_ref.hpp"
#include "vawt/stats.hpp"
#include "vawt/stl_io.hpp"

namespace vawt {

namespace {

struct OracleOptions {
    std::string oracle = "sim";
    std::string exchange_dir;
    long poll_ms = 50;
    long timeout_ms = 60000;
    int smooth_steps = 50;
    double v0 = 4.4;
    double gamma = 0.25;
};

void add_oracle_options(CLI::App* cmd, OracleOptions& o) {
    cmd->add_option("--oracle", o.oracle, "fitness source")
        ->check(CLI::IsMember({"sim", "hw"}))
        ->capture_default_str();
    cmd->add_option("--exchange-dir", o.exchange_dir,
                    "hardware exchange directory (required with --oracle hw)");
    cmd->add_option("--poll-ms", o.poll_ms, "hardware results poll interval")
        ->capture_default_str();
    cmd->add_option("--timeout-ms", o.timeout_ms, "hardware results timeout")
        ->capture_default_str();
    cmd->add_option("--smooth", o.smooth_steps, "smoothing steps for exported meshes")
        ->capture_default_str();
    cmd->add_option("--v0", o.v0, "free-stream wind speed, m/s")->capture_default_str();
    cmd->add_option("--gamma", o.gamma, "pair-mode gap acceleration factor")
        ->capture_default_str();
}

WindSetup wind_of(const OracleOptions& o) {
    WindSetup w;
    w.v0 = o.v0;
    w.gamma = o.gamma;
    return w;
}

void require_exchange_dir(const OracleOptions& o) {
    if (o.oracle == "hw" && o.exchange_dir.empty())
        throw CLI::ValidationError("--exchange-dir", "required when --oracle hw");
}

std::map<std::string, std::string> resolved_config(const std::string& mode, bool z_varying,
                                                   long long budget, std::uint64_t seed,
                                                   const OracleOptions& o,
                                                   const EngineParams& params,
                                                   const std::string& init,
                                                   const std::string& log_path) {
    std::map<std::string, std::string> cfg;
    cfg["mode"] = mode;
    cfg["z_varying"] = z_varying ? "1" : "0";
    cfg["budget"] = std::to_string(budget);
    cfg["seed"] = std::to_string(seed);
    cfg["oracle"] = o.oracle;
    cfg["exchange_dir"] = o.exchange_dir;
    cfg["poll_ms"] = std::to_string(o.poll_ms);
    cfg["timeout_ms"] = std::to_string(o.timeout_ms);
    cfg["smooth_steps"] = std::to_string(o.smooth_steps);
    cfg["v0"] = format_double(o.v0);
    cfg["gamma"] = format_double(o.gamma);
    cfg["gap_side_cols"] = std::to_string(WindSetup{}.gap_side_cols);
    cfg["spacing_voxels"] = std::to_string(WindSetup{}.spacing_voxels);
    cfg["population"] = std::to_string(params.population);
    cfg["tournament_k"] = std::to_string(params.tournament_k);
    cfg["mutation_rate"] = format_double(params.mutation_rate);
    cfg["mutation_step"] = std::to_string(params.mutation_step);
    cfg["crossover_rate"] = format_double(params.crossover_rate);
    cfg["train_epochs"] = std::to_string(params.train_epochs);
    cfg["hidden"] = std::to_string(params.hidden);
    cfg["warm_start_generations"] = std::to_string(params.warm_start_generations);
    cfg["init"] = init;
    cfg["log"] = log_path;
    return cfg;
}

std::filesystem::path replicate_log_path(const std::filesystem::path& base, std::uint64_t seed,
                                         int repeats) {
    if (repeats <= 1) return base;
    std::filesystem::path p = base;
    std::string stem = p.stem().string();
    std::string ext = p.extension().string();
    p.replace_filename(stem + ".s" + std::to_string(seed) + ext);
    return p;
}

std::string champion_line(const RunLog& log) {
    std::string s = "champion \"" + format_genotype(log.champion) + "\" rpm " +
                    format_double(log.champion_rpm);
    if (log.champion_partner)
        s += "\npartner \"" + format_genotype(*log.champion_partner) + "\"";
    return s;
}

int cmd_translate(const std::string& genome_text, const std::string& stl_path,
                  const std::string& format, int smooth_steps, const std::string& dump_path) {
    Genotype g = parse_genotype(genome_text);
    VoxelGrid grid = build_grid(g);
    if (!dump_path.empty()) {
        std::ofstream out(dump_path);
        if (!out) throw std::runtime_error("cannot open for writing: " + dump_path);
        out << dump_voxels(grid);
    }
    TriMesh mesh = smooth(extract_surface(grid), smooth_steps);
    write_stl_file(stl_path, mesh,
                   format == "ascii" ? StlFormat::ascii : StlFormat::binary);
    return 0;
}

// One replicate of evolve/coevolve; returns the text to print for it.
template <typename RunFn>
std::string run_one(const RunFn& run) {
    RunLog log = run();
    return champion_line(log);
}

int run_replicated(int repeats, bool parallel_ok,
                   const std::function<std::string(int)>& replicate) {
    std::vector<std::string> outputs(static_cast<std::size_t>(repeats));
    std::vector<std::string> errors(static_cast<std::size_t>(repeats));
    if (parallel_ok && repeats > 1) {
#pragma omp parallel for schedule(dynamic)
        for (int k = 0; k < repeats; ++k) {
            try {
                outputs[static_cast<std::size_t>(k)] = replicate(k);
            } catch (const std::exception& e) {
                errors[static_cast<std::size_t>(k)] = e.what();
            }
        }
    } else {
        for (int k = 0; k < repeats; ++k) {
            try {
                outputs[static_cast<std::size_t>(k)] = replicate(k);
            } catch (const std::exception& e) {
                errors[static_cast<std::size_t>(k)] = e.what();
            }
        }
    }
    bool failed = false;
    for (int k = 0; k < repeats; ++k) {
        if (!errors[static_cast<std::size_t>(k)].empty()) {
            std::cerr << "error: " << errors[static_cast<std::size_t>(k)] << '\n';
            failed = true;
        } else {
            std::cout << outputs[static_cast<std::size_t>(k)] << '\n';
        }
    }
    return failed ? 2 : 0;
}

int cmd_evolve(const std::string& mode, bool z_varying, long long budget, std::uint64_t seed,
               const OracleOptions& oracle_opts, int warm_start, const std::string& log_path,
               int repeats) {
    require_exchange_dir(oracle_opts);
    EngineParams params;
    params.warm_start_generations = warm_start;
    auto replicate = [&](int k) {
        std::uint64_t rseed = seed + static_cast<std::uint64_t>(k);
        RunConfig cfg;
        cfg.budget = budget;
        cfg.seed = rseed;
        cfg.genome_mode = z_varying ? GenomeMode::z_varying : GenomeMode::flat;
        cfg.params = params;
        cfg.log_path = replicate_log_path(log_path, rseed, repeats);
        cfg.log_config = resolved_config(mode, z_varying, budget, rseed, oracle_opts, params,
                                         "random", cfg.log_path.string());
        std::unique_ptr<SingleEvaluator> evaluator;
        std::unique_ptr<HwExchange> exchange;
        if (oracle_opts.oracle == "hw") {
            exchange = std::make_unique<HwExchange>(
                oracle_opts.exchange_dir, std::chrono::milliseconds(oracle_opts.poll_ms),
                std::chrono::milliseconds(oracle_opts.timeout_ms));
            evaluator = std::make_unique<HwSingleEvaluator>(*exchange, oracle_opts.smooth_steps);
        } else {
            evaluator = std::make_unique<SimSingleEvaluator>(wind_of(oracle_opts));
        }
        return run_one([&] {
            return mode == "sga" ? run_sga(cfg, *evaluator) : run_ga(cfg, *evaluator);
        });
    };
    return run_replicated(repeats, oracle_opts.oracle == "sim", replicate);
}

int cmd_coevolve(const std::string& mode, long long budget, std::uint64_t seed,
                 const OracleOptions& oracle_opts, const std::string& seed_from, bool random_init,
                 const std::string& log_path, int repeats) {
    require_exchange_dir(oracle_opts);
    if (seed_from.empty() == !random_init)
        throw CLI::ValidationError("--seed-from",
                                   "exactly one of --seed-from and --random-init is required");
    EngineParams params;
    std::optional<ArraySeeds> seeds;
    if (!seed_from.empty())
        seeds = seed_array_populations(parse_runlog_file(seed_from).rows, params.population);
    auto replicate = [&](int k) {
        std::uint64_t rseed = seed + static_cast<std::uint64_t>(k);
        RunConfig cfg;
        cfg.budget = budget;
        cfg.seed = rseed;
        cfg.genome_mode = GenomeMode::array;
        cfg.params = params;
        cfg.log_path = replicate_log_path(log_path, rseed, repeats);
        cfg.log_config =
            resolved_config(mode, true, budget, rseed, oracle_opts, params,
                            random_init ? "random" : "seed:" + seed_from, cfg.log_path.string());
        std::unique_ptr<PairEvaluator> evaluator;
        std::unique_ptr<HwExchange> exchange;
        if (oracle_opts.oracle == "hw") {
            exchange = std::make_unique<HwExchange>(
                oracle_opts.exchange_dir, std::chrono::milliseconds(oracle_opts.poll_ms),
                std::chrono::milliseconds(oracle_opts.timeout_ms));
            evaluator = std::make_unique<HwPairEvaluator>(*exchange, oracle_opts.smooth_steps);
        } else {
            evaluator = std::make_unique<SimPairEvaluator>(wind_of(oracle_opts));
        }
        return run_one([&] {
            return mode == "scga" ? run_scga(cfg, *evaluator, seeds)
                                  : run_cga(cfg, *evaluator, seeds);
        });
    };
    return run_replicated(repeats, oracle_opts.oracle == "sim", replicate);
}

int cmd_eval(const std::string& genome_text, const std::string& pair_text, int spin,
             const OracleOptions& oracle_opts) {
    if (oracle_opts.oracle != "sim")
        throw CLI::ValidationError("--oracle", "eval supports the simulated oracle only");
    Genotype g = parse_genotype(genome_text);
    WindSetup wind = wind_of(oracle_opts);
    if (pair_text.empty()) {
        FitnessResult res = sim_single(build_grid(g), spin, wind);
        std::cout << "rpm " << format_double(res.rpm) << '\n';
    } else {
        Genotype east = parse_genotype(pair_text);
        FitnessResult res = sim_pair(build_grid(g), spin, build_grid(east), spin, wind);
        std::cout << "rpm " << format_double(res.rpm) << '\n'
                  << "west_rpm " << format_double(res.per_turbine[0]) << '\n'
                  << "east_rpm " << format_double(res.per_turbine[1]) << '\n';
    }
    return 0;
}

std::vector<double> final_bests(const std::vector<std::string>& paths, std::string& columns) {
    std::vector<double> out;
    for (const auto& p : paths) {
        ParsedRunLog log = parse_runlog_file(p);
        if (log.rows.empty()) throw std::runtime_error("log has no rows: " + p);
        if (columns.empty())
            columns = log.columns;
        else if (columns != log.columns)
            throw std::runtime_error("mismatched log schema in " + p);
        out.push_back(log.rows.back().best_rpm);
    }
    return out;
}

int cmd_stats(const std::vector<std::string>& arm_a, const std::vector<std::string>& arm_b,
              const std::string& test, const std::string& alternative) {
    if (arm_a.size() < 2 || arm_b.size() < 2)
        throw CLI::ValidationError("--arm-a/--arm-b", "need at least 2 logs per arm");
    std::string columns;
    std::vector<double> a = final_bests(arm_a, columns);
    std::vector<double> b = final_bests(arm_b, columns);
    auto print_arm = [](const char* name, const std::vector<double>& v) {
        SampleSummary s = summarize(v);
        std::cout << "arm " << name << ": n=" << s.n << " mean=" << format_double(s.mean)
                  << " sd=" << format_double(s.sd) << " median=" << format_double(s.median)
                  << '\n';
    };
    print_arm("A", a);
    print_arm("B", b);
    Alternative alt = alternative == "greater" ? Alternative::greater
                      : alternative == "less"  ? Alternative::less
                                               : Alternative::two_sided;
    TestResult r = test == "t" ? welch_t_test(a, b, alt) : mann_whitney_u(a, b, alt);
    std::cout << "test=" << test << " alternative=" << alternative
              << " statistic=" << format_double(r.statistic)
              << " p=" << format_double(r.p_value);
    if (test == "t") std::cout << " df=" << format_double(r.df);
    std::cout << '\n';
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"voxel wind-turbine design pipeline"};
    app.require_subcommand(1);
    app.set_config("--config");

    // translate
    auto* translate = app.add_subcommand("translate", "genome -> voxel grid -> smoothed STL");
    std::string genome_text, stl_path, stl_format = "binary", dump_path;
    int smooth_steps = 50;
    translate->add_option("genome", genome_text, "genotype, e.g. \"xy=2,2,3,4,5,8,13,20,34,40\"")
        ->required();
    translate->add_option("--stl", stl_path, "output STL path")->required();
    translate->add_option("--format", stl_format, "STL flavour")
        ->check(CLI::IsMember({"binary", "ascii"}))
        ->capture_default_str();
    translate->add_option("--smooth", smooth_steps, "smoothing steps")->capture_default_str();
    translate->add_option("--dump-voxels", dump_path, "also write a voxel occupancy text dump");

    // evolve
    auto* evolve = app.add_subcommand("evolve", "single-turbine optimization (ga or sga)");
    std::string ev_mode = "ga", ev_log;
    bool ev_z = false;
    long long ev_budget = 100;
    std::uint64_t ev_seed = 1;
    int ev_warm = 0, ev_repeats = 1;
    OracleOptions ev_oracle;
    evolve->add_option("--mode", ev_mode)->check(CLI::IsMember({"ga", "sga"}))
        ->capture_default_str();
    evolve->add_flag("--z-varying", ev_z, "use the 15-gene height-varying encoding");
    evolve->add_option("--budget", ev_budget, "max real evaluations")->capture_default_str();
    evolve->add_option("--seed", ev_seed)->capture_default_str();
    evolve->add_option("--log", ev_log, "run log CSV path")->required();
    evolve->add_option("--warm-start-generations", ev_warm,
                       "plain-GA generations before the surrogate is used (sga)")
        ->capture_default_str();
    evolve->add_option("--repeats", ev_repeats, "replicates with seeds seed, seed+1, ...")
        ->capture_default_str();
    add_oracle_options(evolve, ev_oracle);

    // coevolve
    auto* coevolve = app.add_subcommand("coevolve", "two-turbine array optimization (cga or scga)");
    std::string co_mode = "cga", co_log, co_seed_from;
    bool co_random = false;
    long long co_budget = 160;
    std::uint64_t co_seed = 1;
    int co_repeats = 1;
    OracleOptions co_oracle;
    coevolve->add_option("--mode", co_mode)->check(CLI::IsMember({"cga", "scga"}))
        ->capture_default_str();
    coevolve->add_option("--budget", co_budget, "max real evaluations")->capture_default_str();
    coevolve->add_option("--seed", co_seed)->capture_default_str();
    coevolve->add_option("--seed-from", co_seed_from,
                         "single-turbine run log used to seed both species");
    coevolve->add_flag("--random-init", co_random, "random initial populations instead");
    coevolve->add_option("--log", co_log, "run log CSV path")->required();
    coevolve->add_option("--repeats", co_repeats)->capture_default_str();
    add_oracle_options(coevolve, co_oracle);

    // eval
    auto* eval = app.add_subcommand("eval", "score one genome (or a pair) on the simulated oracle");
    std::string eval_genome, eval_pair;
    int eval_spin = 1;
    OracleOptions eval_oracle;
    eval->add_option("genome", eval_genome)->required();
    eval->add_option("--pair", eval_pair, "east-side genome for a two-turbine array");
    eval->add_option("--spin", eval_spin, "+1 or -1")->check(CLI::IsMember({1, -1}))
        ->capture_default_str();
    add_oracle_options(eval, eval_oracle);

    // stats
    auto* stats = app.add_subcommand("stats", "compare final bests of two arms of run logs");
    std::vector<std::string> arm_a, arm_b;
    std::string test = "rank", alternative = "two-sided";
    stats->add_option("--arm-a", arm_a, "run logs of arm A")->required()->expected(-1);
    stats->add_option("--arm-b", arm_b, "run logs of arm B")->required()->expected(-1);
    stats->add_option("--test", test)->check(CLI::IsMember({"rank", "t"}))->capture_default_str();
    stats->add_option("--alternative", alternative)
        ->check(CLI::IsMember({"two-sided", "greater", "less"}))
        ->capture_default_str();

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("vawt");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (translate->parsed())
            return cmd_translate(genome_text, stl_path, stl_format, smooth_steps, dump_path);
        if (evolve->parsed())
            return cmd_evolve(ev_mode, ev_z, ev_budget, ev_seed, ev_oracle, ev_warm, ev_log,
                              ev_repeats);
        if (coevolve->parsed())
            return cmd_coevolve(co_mode, co_budget, co_seed, co_oracle, co_seed_from, co_random,
                                co_log, co_repeats);
        if (eval->parsed()) return cmd_eval(eval_genome, eval_pair, eval_spin, eval_oracle);
        if (stats->parsed()) return cmd_stats(arm_a, arm_b, test, alternative);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const GenomeParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace vawt
