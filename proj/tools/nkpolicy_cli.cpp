// nkpolicy: command-line front end for landscape ensembles, sweeps and baselines.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <numeric>

#include "nkpolicy/analysis.hpp"
#include "nkpolicy/ensemble.hpp"
#include "nkpolicy/errors.hpp"
#include "nkpolicy/experiment.hpp"

using namespace nkpolicy;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void print_cell(const CellAggregate& c) {
    fmt::print(stderr, "M={} alpha={} <C>={:.4f} +- {:.4f} runs={} timeouts={}\n", c.group_size, c.alpha,
               c.aggregate.mean_cost, c.aggregate.stderr_cost, c.aggregate.runs_used, c.aggregate.timeouts);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Imitative group search on NK landscapes under fitness-dependent influence policies"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen-ensemble", "Generate a landscape ensemble file");
    int gen_count = 30, gen_n = 12, gen_k = 4;
    Seed gen_seed = 1;
    std::string gen_out;
    gen->add_option("--count", gen_count, "Number of landscapes")->capture_default_str();
    gen->add_option("--N", gen_n, "String length")->capture_default_str();
    gen->add_option("--K", gen_k, "Epistasis")->capture_default_str();
    gen->add_option("--seed", gen_seed, "Master seed")->capture_default_str();
    gen->add_option("--out", gen_out, "Output file")->required();

    auto* run = app.add_subcommand("run", "Run a sweep described by a config file");
    std::string run_config, run_out;
    std::vector<std::string> run_sets;
    int run_workers = -1;
    bool paper_scale = false;
    run->add_option("--config", run_config, "Config file (key = value lines)")->required();
    run->add_option("--set", run_sets, "Override a config key, e.g. --set runs=100");
    run->add_option("--workers", run_workers, "Thread count (0 = all cores)");
    run->add_flag("--paper-scale", paper_scale, "10^4 runs per cell and 30 landscapes for K > 0");
    run->add_option("--out", run_out, "Output directory (overrides 'out')");

    auto* analyze = app.add_subcommand("analyze", "Aggregate a raw table into aggregate.csv and histogram.csv");
    std::string an_raw, an_out;
    analyze->add_option("--raw", an_raw, "raw.csv written by 'run'")->required();
    analyze->add_option("--out", an_out, "Output directory")->required();

    auto* baseline = app.add_subcommand("baseline", "Mean cost of M independent blind searchers");
    int base_n = 12, base_m = 1;
    baseline->add_option("--N", base_n, "String length")->capture_default_str();
    baseline->add_option("--M", base_m, "Group size")->capture_default_str();

    auto* inspect = app.add_subcommand("inspect", "Summarise an ensemble file");
    std::string in_path;
    inspect->add_option("--in", in_path, "Ensemble file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*gen) {
            const LandscapeEnsemble e = generate_ensemble(gen_count, gen_n, gen_k, gen_seed, gen_out);
            fmt::print("wrote {} landscapes (N={}, K={}) to {}\n", e.landscapes.size(), e.n, e.k, gen_out);
        } else if (*run) {
            ExperimentConfig config;
            try {
                config = load_config(run_config);
                for (const auto& s : run_sets) apply_override(config, s);
                if (paper_scale) apply_paper_scale(config);
                if (run_workers >= 0) config.workers = run_workers;
                if (!run_out.empty()) config.output_dir = run_out;
                validate(config);
            } catch (const ConfigError& e) {
                throw UsageError(e.what());
            }
            const ResultTable t = run_experiment(config, false);
            for (const auto& c : t.cells) print_cell(c);
            if (!config.output_dir.empty()) fmt::print("results in {}\n", config.output_dir.string());
        } else if (*analyze) {
            for (const auto& c : analyze_raw_file(an_raw, an_out)) print_cell(c);
        } else if (*baseline) {
            fmt::print("{:.6f}\n", independent_cost(base_n, base_m));
        } else if (*inspect) {
            const LandscapeEnsemble e = load_ensemble(in_path);
            fmt::print("landscapes: {}\nN: {}\nK: {}\nmaster_seed: {}\n", e.landscapes.size(), e.n, e.k,
                       e.master_seed);
            if (e.n <= kMaxExhaustiveLength) {
                std::vector<int> maxima;
                double best = 0.0;
                for (const auto& l : e.landscapes) {
                    maxima.push_back(count_local_maxima(l));
                    best = std::max(best, global_maximum(l).fitness);
                }
                const auto [lo, hi] = std::minmax_element(maxima.begin(), maxima.end());
                const double mean = std::accumulate(maxima.begin(), maxima.end(), 0.0) / maxima.size();
                fmt::print("local maxima: min {} max {} mean {:.2f}\nbest global fitness: {:.6f}\n", *lo, *hi,
                           mean, best);
            }
        }
    } catch (const UsageError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    } catch (const ParameterError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 0;
}
