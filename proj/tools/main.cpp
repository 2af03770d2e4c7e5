// Command-line front end. Links the C API only.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "tanglesim/tanglesim.h"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

int status_to_exit(tgs_status s) {
    switch (s) {
        case TGS_OK: return 0;
        case TGS_ERR_CONFIG:
        case TGS_ERR_BADARG:
        case TGS_ERR_UNKNOWN: return kExitConfig;
        default: return kExitRuntime;
    }
}

struct RunJob {
    std::string scenario_path;
    std::string out_dir;
};

int run_one(const RunJob& job, bool have_seed, std::uint64_t seed, const std::string& theta,
            std::mutex& log_mutex) {
    tgs_scenario* scenario = nullptr;
    tgs_status st = tgs_scenario_parse_file(job.scenario_path.c_str(), &scenario);
    if (st != TGS_OK) {
        std::lock_guard lock(log_mutex);
        std::cerr << job.scenario_path << ": " << tgs_last_error() << "\n";
        return status_to_exit(st);
    }
    if (have_seed) tgs_scenario_set_seed(scenario, seed);
    st = tgs_scenario_validate(scenario);
    if (st != TGS_OK) {
        std::lock_guard lock(log_mutex);
        std::cerr << job.scenario_path << ": invalid scenario:\n" << tgs_last_error();
        tgs_scenario_free(scenario);
        return status_to_exit(st);
    }
    tgs_run* run = nullptr;
    st = tgs_simulate(scenario, &run);
    tgs_scenario_free(scenario);
    if (st != TGS_OK) {
        std::lock_guard lock(log_mutex);
        std::cerr << job.scenario_path << ": " << tgs_last_error() << "\n";
        return status_to_exit(st);
    }
    st = tgs_run_write(run, job.out_dir.c_str(), theta.empty() ? nullptr : theta.c_str());
    if (st != TGS_OK) {
        std::lock_guard lock(log_mutex);
        std::cerr << job.scenario_path << ": " << tgs_last_error() << "\n";
        tgs_run_free(run);
        return status_to_exit(st);
    }
    tgs_run_free(run);
    {
        std::lock_guard lock(log_mutex);
        std::cout << job.scenario_path << " -> " << job.out_dir << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tanglesim: deterministic simulator for a DAG-based UTXO ledger with "
                 "cooperative consensus"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run one or more scenarios");
    std::vector<std::string> scenario_paths;
    std::string out_dir;
    std::string theta = "2/3";
    std::uint64_t seed = 0;
    bool have_seed = false;
    unsigned jobs = 1;
    run->add_option("--scenario,scenario", scenario_paths, "scenario file(s)")->required();
    run->add_option("--out", out_dir, "output directory (default: out)");
    run->add_option("--theta", theta, "finality parameter for the summary, e.g. 2/3");
    run->add_option("--seed", seed, "override the scenario masterSeed")
        ->each([&](const std::string&) { have_seed = true; });
    run->add_option("--jobs", jobs, "parallel scenario runs")->check(CLI::Range(1u, 64u));

    // analyze
    auto* analyze = app.add_subcommand("analyze", "analyze a written trace directory");
    std::string trace_dir;
    std::string analyze_theta = "2/3";
    analyze->add_option("--trace,trace", trace_dir, "directory containing trace.log")->required();
    analyze->add_option("--theta", analyze_theta, "finality parameter, e.g. 2/3 or 0.66");

    // inspect
    auto* inspect = app.add_subcommand("inspect", "print a bundled fixture");
    std::string fixture;
    bool list_fixtures = false;
    inspect->add_option("fixture", fixture, "fixture name");
    inspect->add_flag("--list", list_fixtures, "list bundled fixtures");

    // validate
    auto* validate = app.add_subcommand("validate", "validate a scenario file");
    std::string validate_path;
    validate->add_option("--scenario,scenario", validate_path, "scenario file")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        if (out_dir.empty()) out_dir = "out";
        std::vector<RunJob> batch;
        for (const std::string& path : scenario_paths) {
            RunJob job;
            job.scenario_path = path;
            if (scenario_paths.size() == 1) {
                job.out_dir = out_dir;
            } else {
                job.out_dir =
                    (std::filesystem::path(out_dir) / std::filesystem::path(path).stem()).string();
            }
            batch.push_back(std::move(job));
        }
        std::mutex log_mutex;
        std::atomic<int> worst{0};
        if (jobs <= 1 || batch.size() <= 1) {
            for (const RunJob& job : batch) {
                int rc = run_one(job, have_seed, seed, theta, log_mutex);
                if (rc > worst) worst = rc;
            }
        } else {
            std::atomic<std::size_t> next{0};
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < jobs; ++t) {
                pool.emplace_back([&] {
                    for (;;) {
                        std::size_t i = next.fetch_add(1);
                        if (i >= batch.size()) return;
                        int rc = run_one(batch[i], have_seed, seed, theta, log_mutex);
                        int cur = worst.load();
                        while (rc > cur && !worst.compare_exchange_weak(cur, rc)) {
                        }
                    }
                });
            }
            for (auto& t : pool) t.join();
        }
        return worst.load();
    }

    if (analyze->parsed()) {
        char* json = nullptr;
        tgs_status st = tgs_analyze(trace_dir.c_str(), analyze_theta.c_str(), &json);
        if (st != TGS_OK) {
            std::cerr << tgs_last_error() << "\n";
            return status_to_exit(st);
        }
        std::cout << json;
        tgs_string_free(json);
        std::filesystem::path out = std::filesystem::path(trace_dir) / "analysis.json";
        if (FILE* f = std::fopen(out.string().c_str(), "wb")) {
            char* again = nullptr;
            if (tgs_analyze(trace_dir.c_str(), analyze_theta.c_str(), &again) == TGS_OK) {
                std::fwrite(again, 1, std::strlen(again), f);
                tgs_string_free(again);
            }
            std::fclose(f);
        }
        return 0;
    }

    if (inspect->parsed()) {
        char* text = nullptr;
        tgs_status st = tgs_inspect(list_fixtures || fixture.empty() ? nullptr : fixture.c_str(),
                                    &text);
        if (st != TGS_OK) {
            std::cerr << tgs_last_error() << "\n";
            return status_to_exit(st);
        }
        std::cout << text;
        tgs_string_free(text);
        return 0;
    }

    if (validate->parsed()) {
        tgs_scenario* scenario = nullptr;
        tgs_status st = tgs_scenario_parse_file(validate_path.c_str(), &scenario);
        if (st != TGS_OK) {
            std::cerr << tgs_last_error() << "\n";
            return status_to_exit(st);
        }
        st = tgs_scenario_validate(scenario);
        tgs_scenario_free(scenario);
        if (st != TGS_OK) {
            std::cerr << "invalid scenario:\n" << tgs_last_error();
            return status_to_exit(st);
        }
        std::cout << "ok\n";
        return 0;
    }
    return kExitConfig;
}
