#include "tanglesim/tanglesim.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tanglesim/analysis.hpp"
#include "tanglesim/fixtures.hpp"
#include "tanglesim/netsim.hpp"

using namespace tanglesim;

struct tgs_scenario {
    Scenario scenario;
};

struct tgs_run {
    Trace trace;
    std::string summary_cache;
};

namespace {

thread_local std::string g_last_error;

tgs_status fail(tgs_status code, std::string msg) {
    g_last_error = std::move(msg);
    return code;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

Theta theta_or_default(const char* text, bool& ok) {
    ok = true;
    if (!text || !*text) return Theta{2, 3};
    auto th = parse_theta(text);
    if (!th || !th->in_range()) {
        ok = false;
        return Theta{2, 3};
    }
    return *th;
}

}  // namespace

extern "C" {

const char* tgs_version(void) { return "tanglesim 1.0.0"; }

const char* tgs_status_name(tgs_status status) {
    switch (status) {
        case TGS_OK: return "ok";
        case TGS_ERR_BADARG: return "bad-argument";
        case TGS_ERR_CONFIG: return "config-error";
        case TGS_ERR_IO: return "io-error";
        case TGS_ERR_RUNTIME: return "runtime-error";
        case TGS_ERR_UNKNOWN: return "unknown-name";
    }
    return "invalid-status";
}

const char* tgs_last_error(void) { return g_last_error.c_str(); }

tgs_status tgs_scenario_parse_file(const char* path, tgs_scenario** out) {
    if (!path || !out) return fail(TGS_ERR_BADARG, "null argument");
    *out = nullptr;
    try {
        auto handle = new tgs_scenario{load_scenario_file(path)};
        *out = handle;
        return TGS_OK;
    } catch (const ScenarioError& e) {
        return fail(TGS_ERR_CONFIG, e.what());
    } catch (const std::exception& e) {
        return fail(TGS_ERR_IO, e.what());
    }
}

tgs_status tgs_scenario_parse_text(const char* json_text, tgs_scenario** out) {
    if (!json_text || !out) return fail(TGS_ERR_BADARG, "null argument");
    *out = nullptr;
    try {
        auto handle = new tgs_scenario{parse_scenario(json_text)};
        *out = handle;
        return TGS_OK;
    } catch (const std::exception& e) {
        return fail(TGS_ERR_CONFIG, e.what());
    }
}

tgs_status tgs_scenario_set_seed(tgs_scenario* scenario, uint64_t seed) {
    if (!scenario) return fail(TGS_ERR_BADARG, "null scenario");
    scenario->scenario.master_seed = seed;
    return TGS_OK;
}

tgs_status tgs_scenario_validate(const tgs_scenario* scenario) {
    if (!scenario) return fail(TGS_ERR_BADARG, "null scenario");
    auto violations = validate_scenario(scenario->scenario);
    if (violations.empty()) return TGS_OK;
    std::ostringstream os;
    for (const std::string& v : violations) os << v << "\n";
    return fail(TGS_ERR_CONFIG, os.str());
}

void tgs_scenario_free(tgs_scenario* scenario) { delete scenario; }

tgs_status tgs_simulate(const tgs_scenario* scenario, tgs_run** out) {
    if (!scenario || !out) return fail(TGS_ERR_BADARG, "null argument");
    *out = nullptr;
    try {
        Simulation sim(scenario->scenario);
        auto run = new tgs_run{sim.run(), {}};
        *out = run;
        return TGS_OK;
    } catch (const ScenarioError& e) {
        return fail(TGS_ERR_CONFIG, e.what());
    } catch (const std::exception& e) {
        return fail(TGS_ERR_RUNTIME, e.what());
    }
}

tgs_status tgs_run_write(const tgs_run* run, const char* out_dir, const char* theta) {
    if (!run || !out_dir) return fail(TGS_ERR_BADARG, "null argument");
    bool theta_ok = true;
    Theta th = theta_or_default(theta, theta_ok);
    if (!theta_ok) return fail(TGS_ERR_BADARG, "theta must satisfy 1/2 < theta < 1");
    try {
        namespace fs = std::filesystem;
        fs::create_directories(out_dir);
        {
            std::ofstream f(fs::path(out_dir) / "trace.log", std::ios::binary);
            if (!f) return fail(TGS_ERR_IO, "cannot write trace.log");
            write_trace_log(run->trace, f);
        }
        ConvergenceReport report = convergence_metrics(run->trace, th);
        {
            std::ofstream f(fs::path(out_dir) / "metrics.csv", std::ios::binary);
            if (!f) return fail(TGS_ERR_IO, "cannot write metrics.csv");
            write_metrics_csv(report, f);
        }
        {
            std::ofstream f(fs::path(out_dir) / "summary.json", std::ios::binary);
            if (!f) return fail(TGS_ERR_IO, "cannot write summary.json");
            write_summary_json(report, run->trace, f);
        }
        return TGS_OK;
    } catch (const std::exception& e) {
        return fail(TGS_ERR_RUNTIME, e.what());
    }
}

const char* tgs_run_summary_json(tgs_run* run) {
    if (!run) return "";
    if (run->summary_cache.empty()) {
        try {
            ConvergenceReport report = convergence_metrics(run->trace, Theta{2, 3});
            std::ostringstream os;
            write_summary_json(report, run->trace, os);
            run->summary_cache = os.str();
        } catch (const std::exception& e) {
            run->summary_cache = std::string("{\"error\":\"") + e.what() + "\"}";
        }
    }
    return run->summary_cache.c_str();
}

void tgs_run_free(tgs_run* run) { delete run; }

tgs_status tgs_analyze(const char* trace_dir, const char* theta, char** json_out) {
    if (!trace_dir || !json_out) return fail(TGS_ERR_BADARG, "null argument");
    *json_out = nullptr;
    bool theta_ok = true;
    Theta th = theta_or_default(theta, theta_ok);
    if (!theta_ok) return fail(TGS_ERR_BADARG, "theta must satisfy 1/2 < theta < 1");
    try {
        namespace fs = std::filesystem;
        std::ifstream f(fs::path(trace_dir) / "trace.log", std::ios::binary);
        if (!f) return fail(TGS_ERR_IO, std::string("no trace.log under ") + trace_dir);
        Trace trace = read_trace_log(f);
        ConvergenceReport report = convergence_metrics(trace, th);
        *json_out = dup_string(analysis_json(report, trace, th));
        return *json_out ? TGS_OK : fail(TGS_ERR_RUNTIME, "out of memory");
    } catch (const std::exception& e) {
        return fail(TGS_ERR_RUNTIME, e.what());
    }
}

tgs_status tgs_inspect(const char* fixture_name, char** text_out) {
    if (!text_out) return fail(TGS_ERR_BADARG, "null argument");
    *text_out = nullptr;
    try {
        if (!fixture_name) {
            std::ostringstream os;
            for (const std::string& n : fixture_names()) os << n << "\n";
            *text_out = dup_string(os.str());
            return *text_out ? TGS_OK : fail(TGS_ERR_RUNTIME, "out of memory");
        }
        auto fx = make_fixture(fixture_name);
        if (!fx)
            return fail(TGS_ERR_UNKNOWN, std::string("unknown fixture: ") + fixture_name);
        *text_out = dup_string(fx->describe());
        return *text_out ? TGS_OK : fail(TGS_ERR_RUNTIME, "out of memory");
    } catch (const std::exception& e) {
        return fail(TGS_ERR_RUNTIME, e.what());
    }
}

void tgs_string_free(char* s) { std::free(s); }

}  // extern "C"
