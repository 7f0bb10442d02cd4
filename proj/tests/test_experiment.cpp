#include "lcg/experiment.hpp"

#include <gtest/gtest.h>

using namespace lcg;

namespace {

std::vector<Diagnostic> errors_of(const std::vector<Diagnostic>& d) {
    std::vector<Diagnostic> out;
    for (const auto& x : d)
        if (x.severity == Severity::error) out.push_back(x);
    return out;
}

const char* kValid = R"({
  "seed": 42,
  "budget": {"samples": 4000, "frames": 16},
  "functions": {
    "gaussian2d": {"variant": "gaussian", "dim": 2},
    "square": {"variant": "pla", "dim": 2, "constraints": [1, 0, -1, 0, 0, 1, 0, -1], "bounds": [1, 1, 1, 1]}
  },
  "tasks": [
    {"compute": "quermassintegral", "f": "gaussian2d", "j": 1},
    {"check": "t3", "f1": "gaussian2d", "f2": "gaussian2d", "k": 1}
  ]
})";

}  // namespace

TEST(Config, ValidConfigHasNoDiagnostics) {
    std::vector<Diagnostic> d;
    const ExperimentConfig cfg = parse_config(kValid, d);
    EXPECT_TRUE(d.empty()) << to_string(d.front());
    EXPECT_EQ(cfg.seed, 42u);
    EXPECT_EQ(cfg.budget.samples, 4000u);
    EXPECT_EQ(cfg.functions.size(), 2u);
    EXPECT_EQ(cfg.tasks.size(), 2u);
    EXPECT_TRUE(cfg.function("square")->fn->is_indicator());
}

TEST(Config, UnknownCheckIdNamesTheField) {
    const auto d = validate_config(R"({"seed": 1, "tasks": [{"check": "t9"}]})");
    ASSERT_EQ(errors_of(d).size(), 1u);
    EXPECT_EQ(d[0].where, "/tasks/0/check");
    EXPECT_NE(d[0].message.find("t9"), std::string::npos);
}

TEST(Config, EmptyTaskListWarns) {
    const auto d = validate_config(R"({"seed": 1, "tasks": []})");
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].severity, Severity::warning);
    EXPECT_EQ(d[0].where, "/tasks");
}

TEST(Config, NonPositiveDefinitePrecisionNamesTheMatrix) {
    const auto d = validate_config(
        R"({"seed": 1, "functions": {"bad": {"variant": "gaussian", "dim": 2, "precision": [1, 2, 2, 1]}}, "tasks": []})");
    const auto e = errors_of(d);
    ASSERT_EQ(e.size(), 1u);
    EXPECT_EQ(e[0].where, "/functions/bad/precision");
    EXPECT_NE(e[0].message.find("positive definite"), std::string::npos);
}

TEST(Config, SyntaxErrorsCarryLineAndColumn) {
    const auto d = validate_config("{\n  \"seed\": 1,\n  \"tasks\": [}\n");
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].where.rfind("line 3, column", 0), 0u) << d[0].where;
}

TEST(Config, StructuralErrors) {
    auto where = [](const char* text) {
        std::vector<std::string> out;
        for (const auto& x : errors_of(validate_config(text))) out.push_back(x.where);
        return out;
    };
    EXPECT_EQ(where(R"({"seed": -1, "tasks": []})"), std::vector<std::string>{"/seed"});
    EXPECT_EQ(where(R"({"seed": 1, "budget": {"samples": 0}, "tasks": []})"), std::vector<std::string>{"/budget/samples"});
    EXPECT_EQ(where(R"({"seed": 1, "tasks": [{"check": "sobolev", "f1": "nope"}]})"), std::vector<std::string>{"/tasks/0/f1"});
    EXPECT_EQ(where(R"({"seed": 1, "functions": {"g": {"variant": "gaussian", "dim": 2}},
                        "tasks": [{"check": "alexandrov_norm", "f1": "g", "k": 2}]})"),
              std::vector<std::string>{"/tasks/0/k"});
    EXPECT_EQ(where(R"({"seed": 1, "functions": {"g": {"variant": "gaussian", "dim": 2}},
                        "tasks": [{"check": "grinberg_classical", "f1": "g", "k": 1}]})"),
              std::vector<std::string>{"/tasks/0/f1"});
    EXPECT_EQ(where(R"({"seed": 1, "tasks": [{"suite": "paper-core", "dims": [4]}]})"), std::vector<std::string>{"/tasks/0/dims"});
    EXPECT_EQ(where(R"({"seed": 1, "tasks": [{"suite": "everything"}]})"), std::vector<std::string>{"/tasks/0/suite"});
    EXPECT_EQ(where(R"({"seed": 1, "tasks": [{"compute": "norm", "check": "t3"}]})"), std::vector<std::string>{"/tasks/0"});
    EXPECT_EQ(where(R"({"seed": 1, "functions": {"p": {"variant": "pla", "dim": 2, "slopes": [1, 2, 3]}}, "tasks": []})"),
              std::vector<std::string>{"/functions/p/slopes"});
    // an unbounded constant function is not integrable
    EXPECT_EQ(where(R"({"seed": 1, "functions": {"p": {"variant": "pla", "dim": 2}}, "tasks": []})"),
              std::vector<std::string>{"/functions/p"});
}

TEST(Config, UnknownKeysWarn) {
    const auto d = validate_config(R"({"seed": 1, "colour": "red", "tasks": [{"suite": "steiner"}]})");
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].severity, Severity::warning);
    EXPECT_EQ(d[0].where, "/colour");
}

TEST(FunctionSpec, BuiltinAndAffine) {
    std::vector<Diagnostic> d;
    const auto f = parse_function_spec(
        Json::parse(R"({"builtin": "cube", "dim": 2, "affine": {"linear": [2, 0, 0, 1], "shift": [1, 0]}})"), "/f", d);
    ASSERT_TRUE(f);
    EXPECT_TRUE(d.empty());
    EXPECT_EQ((*f)(Vec::Constant(2, 0.0)), 1.0);
    EXPECT_EQ((*f)((Vec(2) << 2.9, 0.0).finished()), 1.0);
    EXPECT_EQ((*f)((Vec(2) << -1.1, 0.0).finished()), 0.0);
    const auto g = parse_function_spec(Json::parse(R"({"builtin": "cube", "dim": 2, "affine": {"linear": [1, 1, 1, 1]}})"), "/g", d);
    EXPECT_FALSE(g);
    EXPECT_EQ(d.back().where, "/g/affine/linear");
}

TEST(Run, ComputeQuermassintegralRow) {
    std::vector<Diagnostic> d;
    const ExperimentConfig cfg = parse_config(kValid, d);
    const RunResult r = run_experiment(cfg, 1);
    ASSERT_EQ(r.results.size(), 2u);
    ASSERT_EQ(r.results[0].values.size(), 1u);
    const ValueRow& v = r.results[0].values[0];
    EXPECT_NEAR(v.value.value, 3.9374, 3.0 * v.value.std_error + 1e-4);
    EXPECT_EQ(v.param, "j=1");
    EXPECT_EQ(r.summary.pass, 1u);
    EXPECT_EQ(r.summary.exit_code(), 0);
    const std::string csv = values_csv(r);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), values_header());
    EXPECT_NE(csv.find("quermassintegral,gaussian2d,2,j=1,3.937"), std::string::npos);
}

TEST(Run, TaskErrorsDoNotStopTheRun) {
    std::vector<Diagnostic> d;
    const ExperimentConfig cfg = parse_config(R"({"seed": 3, "budget": {"samples": 2000, "frames": 8},
      "functions": {"big": {"builtin": "cube", "dim": 2, "affine": {"linear": [2, 0, 0, 2]}}, "small": {"builtin": "cube", "dim": 2}},
      "tasks": [{"check": "t2", "f1": "big", "f2": "small", "k": 1}, {"check": "sobolev", "f1": "small"}]})",
                                              d);
    ASSERT_FALSE(has_errors(d));
    const RunResult r = run_experiment(cfg, 2);
    EXPECT_EQ(r.results[0].error_kind, "hypothesis");
    ASSERT_TRUE(r.results[1].check);
    EXPECT_EQ(r.results[1].check->verdict, Verdict::pass);
    EXPECT_EQ(r.summary.errors, 1u);
    EXPECT_EQ(r.summary.exit_code(), 1);
    const std::string csv = summary_csv(r, cfg.seed);
    EXPECT_NE(csv.find("t2,2,1,nan,nan,nan,nan,error,3,0"), std::string::npos);
    const Json rep = report_json(cfg, r);
    EXPECT_EQ(rep["errors"][0]["kind"], "hypothesis");
}

TEST(Run, PresetExpansion) {
    std::vector<Diagnostic> d;
    const ExperimentConfig cfg =
        parse_config(R"({"seed": 1, "tasks": [{"suite": "paper-core", "dims": [2], "functions": ["cube"]}]})", d);
    const auto jobs = expand_jobs(cfg);
    std::set<std::string> ids;
    for (const auto& j : jobs) ids.insert(j.name);
    for (const auto& id : check_ids())
        if (!is_ratio_only(id)) EXPECT_TRUE(ids.count(id)) << id;
    EXPECT_FALSE(ids.count("t4"));
    // 1 sobolev + 1 alexandrov_general + 1 alexandrov_norm + irat + reverse + 2 + 2 + 5 per-k + 3 + 4 pair rows
    EXPECT_EQ(std::count_if(jobs.begin(), jobs.end(), [](const Job& j) { return j.f1.has_value(); }), 21);
}

TEST(Run, WritesNumberedRunDirectories) {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "lcg_test_runs";
    fs::remove_all(base);
    std::vector<Diagnostic> d;
    const std::string text = R"({"seed": 5, "tasks": [{"check": "b_bound", "n": 3, "k": 1}]})";
    const ExperimentConfig cfg = parse_config(text, d);
    const RunResult r = run_experiment(cfg, 1);
    const fs::path a = write_run(base, cfg, r, text);
    const fs::path b = write_run(base, cfg, r, text);
    EXPECT_EQ(a.filename(), "run-001");
    EXPECT_EQ(b.filename(), "run-002");
    EXPECT_EQ(read_file(a / "summary.csv"), read_file(b / "summary.csv"));
    EXPECT_EQ(read_file(a / "summary.csv"), csv_header() + "\nb_bound,3,1,5,16,11,0,pass,5,0\n");
    EXPECT_EQ(read_file(a / "config.json"), text);
    const Json rep = Json::parse(read_file(a / "report.json"));
    EXPECT_EQ(rep["summary"]["pass"], 1);
    fs::remove_all(base);
}
