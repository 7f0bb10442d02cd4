// Command-line front end: validate and run experiment configs, one-off computations and checks.

#include "lcg/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace lcg;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailure = 1;
constexpr int kConfigError = 2;
constexpr int kInternalError = 3;

void print_diagnostics(const std::vector<Diagnostic>& diags, const std::string& source) {
    for (const auto& d : diags) std::cerr << source << ": " << to_string(d) << "\n";
}

struct Common {
    std::uint64_t seed = 42;
    std::size_t samples = Budget{}.samples;
    std::size_t frames = Budget{}.frames;
    unsigned jobs = 1;
    bool force_mc = false;

    void add(CLI::App* app) {
        app->add_option("--seed", seed, "64-bit seed")->capture_default_str();
        app->add_option("--samples", samples, "Monte Carlo samples per integral")->capture_default_str()->check(CLI::PositiveNumber);
        app->add_option("--frames", frames, "Haar frames for Grassmannian averages")->capture_default_str()->check(CLI::Range(2, 1 << 20));
        app->add_option("--jobs", jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
        app->add_flag("--force-mc", force_mc, "skip closed forms and exact polytope paths");
    }

    [[nodiscard]] Json config_base() const {
        Json c;
        c["seed"] = seed;
        c["budget"] = {{"samples", samples}, {"frames", frames}, {"force_mc", force_mc}};
        c["functions"] = Json::object();
        return c;
    }
};

/// Parses a config built in memory from command-line pieces and runs it.
int run_inline(const Json& config, unsigned jobs, bool as_json) {
    std::vector<Diagnostic> diags;
    const std::string text = config.dump();
    const ExperimentConfig cfg = parse_config(text, diags);
    if (has_errors(diags)) {
        print_diagnostics(diags, "arguments");
        return kConfigError;
    }
    const RunResult r = run_experiment(cfg, jobs);
    for (const JobResult& res : r.results)
        if (!res.error_kind.empty()) std::cerr << res.error_kind << " error: " << res.error << "\n";
    if (as_json) {
        std::cout << report_json(cfg, r).dump(2) << "\n";
    } else if (r.summary.checks > 0 || r.summary.errors > 0) {
        std::cout << summary_csv(r, cfg.seed);
    } else {
        std::cout << values_csv(r);
    }
    return r.summary.exit_code();
}

std::optional<Json> load_json(const std::string& path) {
    try {
        return Json::parse(read_file(path));
    } catch (const Json::parse_error& e) {
        std::cerr << path << ": " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
    }
    return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks for log-concave function inequalities"};
    app.require_subcommand(1);

    std::string config_path;
    auto* validate = app.add_subcommand("validate", "check a config without running it");
    validate->add_option("config", config_path, "experiment config (JSON)")->required();

    unsigned run_jobs = 1;
    std::string out_dir;
    auto* run = app.add_subcommand("run", "run every task of a config and write a run directory");
    run->add_option("config", config_path, "experiment config (JSON)")->required();
    run->add_option("--jobs", run_jobs, "concurrent tasks")->check(CLI::PositiveNumber);
    run->add_option("--out", out_dir, "output directory (default: output.dir of the config)");

    Common common;
    std::string functional, fn_path, mode;
    std::string p_arg;
    int j_arg = -1, k_arg = -1;
    bool as_json = false;
    auto* compute = app.add_subcommand("compute", "evaluate one functional of one function");
    compute->add_option("functional", functional, "one of: " + detail::joined(compute_functionals()))->required();
    compute->add_option("--fn", fn_path, "function spec (JSON)")->required();
    compute->add_option("--p", p_arg, "norm exponent, or inf");
    compute->add_option("--j", j_arg, "quermassintegral index");
    compute->add_option("--k", k_arg, "subspace dimension");
    compute->add_option("--mode", mode, "projection or section (subspace_norm)");
    compute->add_flag("--json", as_json, "print the JSON report instead of CSV");
    common.add(compute);

    Common ccommon;
    std::string check_id, f1_path, f2_path;
    int ck = -1, cj = -1, cn = -1, maps = -1;
    double c0 = 0.0, l_sup = 0.0;
    bool check_json = false;
    auto* check = app.add_subcommand("check", "run one row of the check table");
    check->add_option("check_id", check_id, "check identifier")->required();
    check->add_option("--f1", f1_path, "first function spec (JSON)");
    check->add_option("--f2", f2_path, "second function spec (JSON)");
    check->add_option("--k", ck, "subspace dimension");
    check->add_option("--j", cj, "quermassintegral index (alexandrov_general)");
    check->add_option("--n", cn, "dimension (b_bound, omega_ratio)");
    check->add_option("--c0", c0, "constant for omega_ratio");
    check->add_option("--l-sup", l_sup, "L_{n-k} for t6");
    check->add_option("--maps", maps, "random maps for shephard_invariance");
    check->add_flag("--json", check_json, "print the JSON report instead of CSV");
    ccommon.add(check);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (validate->parsed() || run->parsed()) {
            std::string text;
            try {
                text = read_file(config_path);
            } catch (const std::exception& e) {
                std::cerr << e.what() << "\n";
                return kConfigError;
            }
            std::vector<Diagnostic> diags;
            const ExperimentConfig cfg = parse_config(text, diags);
            print_diagnostics(diags, config_path);
            if (has_errors(diags)) return kConfigError;
            if (validate->parsed()) {
                std::cout << config_path << ": ok (" << cfg.functions.size() << " functions, " << cfg.tasks.size()
                          << " tasks, " << expand_jobs(cfg).size() << " jobs)\n";
                return kOk;
            }
            const RunResult r = run_experiment(cfg, run_jobs);
            const auto dir = write_run(out_dir.empty() ? cfg.out_dir : out_dir, cfg, r, text);
            const RunSummary& s = r.summary;
            std::cout << dir.string() << ": " << s.checks << " checks (" << s.pass << " pass, " << s.fail << " fail, "
                      << s.inconclusive << " inconclusive, " << s.ratio_only << " ratio_only), " << s.values
                      << " values, " << s.errors << " errors\n";
            for (std::size_t i = 0; i < r.results.size(); ++i) {
                const JobResult& res = r.results[i];
                if (!res.error_kind.empty())
                    std::cerr << r.jobs[i].task << " " << r.jobs[i].name << ": " << res.error_kind << " error: " << res.error << "\n";
                else if (res.check && res.check->verdict == Verdict::fail)
                    std::cerr << r.jobs[i].task << ": fail " << to_csv_row(*res.check) << "\n";
            }
            return s.exit_code();
        }
        if (compute->parsed()) {
            const auto spec = load_json(fn_path);
            if (!spec) return kConfigError;
            Json cfg = common.config_base();
            cfg["functions"]["f"] = *spec;
            Json task{{"compute", functional}, {"f", "f"}};
            if (!p_arg.empty()) {
                if (p_arg == "inf") task["p"] = "inf";
                else {
                    try {
                        task["p"] = std::stod(p_arg);
                    } catch (const std::exception&) {
                        std::cerr << "--p: expected a number or inf\n";
                        return kConfigError;
                    }
                }
            }
            if (j_arg >= 0) task["j"] = j_arg;
            if (k_arg >= 0) task["k"] = k_arg;
            if (!mode.empty()) task["mode"] = mode;
            cfg["tasks"] = Json::array({task});
            return run_inline(cfg, common.jobs, as_json);
        }
        if (check->parsed()) {
            Json cfg = ccommon.config_base();
            Json task{{"check", check_id}};
            if (!f1_path.empty()) {
                const auto s = load_json(f1_path);
                if (!s) return kConfigError;
                cfg["functions"]["f1"] = *s;
                task["f1"] = "f1";
            }
            if (!f2_path.empty()) {
                const auto s = load_json(f2_path);
                if (!s) return kConfigError;
                cfg["functions"]["f2"] = *s;
                task["f2"] = "f2";
            }
            if (ck >= 0) task["k"] = ck;
            if (cj >= 0) task["j"] = cj;
            if (cn >= 0) task["n"] = cn;
            if (c0 > 0.0) task["c0"] = c0;
            if (l_sup > 0.0) task["l_sup"] = l_sup;
            if (maps > 0) task["maps"] = maps;
            cfg["tasks"] = Json::array({task});
            return run_inline(cfg, ccommon.jobs, check_json);
        }
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternalError;
    }
    return kOk;
}
