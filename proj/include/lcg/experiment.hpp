#pragma once

// Experiment configs: function specs, task lists, preset suites, execution and report files.
//
// Config layout (JSON):
//   { "seed": 42,
//     "budget": {"samples": 20000, "frames": 256, "force_mc": false},
//     "params": {"c0": 1.7, "l_sup": 1.0, "slab": 0.02, "maps": 1},
//     "output": {"dir": "runs"},
//     "functions": {"g": {"variant": "gaussian", "dim": 2}, ...},
//     "tasks": [ {"compute": "quermassintegral", "f": "g", "j": 1},
//                {"check": "t3", "f1": "g", "f2": "g", "k": 1},
//                {"suite": "paper-core", "dims": [2, 3]} ] }

#include "lcg/harness.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace lcg {

// ---------------------------------------------------------------------------
// Diagnostics

enum class Severity { error, warning };

struct Diagnostic {
    Severity severity = Severity::error;
    std::string where;  // JSON pointer into the config, or "line L, column C" for syntax errors
    std::string message;
};

inline std::string to_string(const Diagnostic& d) {
    return std::string(d.severity == Severity::error ? "error" : "warning") + " at " + (d.where.empty() ? "/" : d.where) +
           ": " + d.message;
}

inline bool has_errors(const std::vector<Diagnostic>& diags, std::size_t from = 0) {
    return std::any_of(diags.begin() + static_cast<long>(std::min(from, diags.size())), diags.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::error; });
}

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<Diagnostic> diags)
        : std::runtime_error(diags.empty() ? "invalid config" : to_string(diags.front())), diagnostics(std::move(diags)) {}
    std::vector<Diagnostic> diagnostics;
};

namespace detail {

inline std::string line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

class Reader {
public:
    explicit Reader(std::vector<Diagnostic>& diags) : diags_(diags) {}

    void error(const std::string& where, const std::string& msg) { diags_.push_back({Severity::error, where, msg}); }
    void warning(const std::string& where, const std::string& msg) { diags_.push_back({Severity::warning, where, msg}); }

    std::optional<double> number(const Json& j, const std::string& key, const std::string& path) {
        if (!j.contains(key)) return std::nullopt;
        const Json& v = j.at(key);
        if (!v.is_number()) {
            error(path + "/" + key, "expected a number");
            return std::nullopt;
        }
        return v.get<double>();
    }

    std::optional<long long> integer(const Json& j, const std::string& key, const std::string& path) {
        if (!j.contains(key)) return std::nullopt;
        const Json& v = j.at(key);
        if (!v.is_number_integer()) {
            error(path + "/" + key, "expected an integer");
            return std::nullopt;
        }
        return v.get<long long>();
    }

    std::optional<std::string> string(const Json& j, const std::string& key, const std::string& path) {
        if (!j.contains(key)) return std::nullopt;
        const Json& v = j.at(key);
        if (!v.is_string()) {
            error(path + "/" + key, "expected a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    /// Row-major rows x cols matrix; rows = -1 infers the row count from the length.
    std::optional<Mat> matrix(const Json& j, const std::string& key, const std::string& path, long rows, long cols) {
        if (!j.contains(key)) return std::nullopt;
        const Json& v = j.at(key);
        const std::string p = path + "/" + key;
        if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const Json& x) { return x.is_number(); })) {
            error(p, "expected a flat array of numbers (row-major)");
            return std::nullopt;
        }
        const long len = static_cast<long>(v.size());
        if (cols <= 0 || (rows < 0 && len % cols != 0) || (rows >= 0 && len != rows * cols)) {
            error(p, "expected " + (rows >= 0 ? std::to_string(rows * cols) : "a multiple of " + std::to_string(cols)) +
                         " entries, got " + std::to_string(len));
            return std::nullopt;
        }
        const long r = rows >= 0 ? rows : len / cols;
        Mat m(r, cols);
        for (long i = 0; i < r; ++i)
            for (long c = 0; c < cols; ++c) m(i, c) = v[static_cast<std::size_t>(i * cols + c)].get<double>();
        return m;
    }

    void unknown_keys(const Json& j, const std::string& path, std::initializer_list<const char*> known) {
        for (const auto& [key, _] : j.items())
            if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
                warning(path + "/" + key, "unknown key ignored");
    }

private:
    std::vector<Diagnostic>& diags_;
};

}  // namespace detail

/// Function spec: {"variant": "gaussian"|"pla", "dim": n, ...} or {"builtin": name, "dim": n};
/// optional {"affine": {"linear": [n*n], "shift": [n]}} applies x -> f(A^{-1}(x - shift)).
inline std::optional<LogConcaveFn> parse_function_spec(const Json& j, const std::string& path, std::vector<Diagnostic>& diags) {
    detail::Reader rd(diags);
    if (!j.is_object()) {
        rd.error(path, "function spec must be an object");
        return std::nullopt;
    }
    rd.unknown_keys(j, path, {"variant", "builtin", "dim", "scale", "center", "precision", "slopes", "offsets",
                              "constraints", "bounds", "affine", "description"});
    const auto dim = rd.integer(j, "dim", path);
    if (!dim) {
        if (!j.contains("dim")) rd.error(path + "/dim", "missing dimension");
        return std::nullopt;
    }
    if (*dim < 1 || *dim > 16) {
        rd.error(path + "/dim", "dimension must be between 1 and 16");
        return std::nullopt;
    }
    const int n = static_cast<int>(*dim);
    std::optional<LogConcaveFn> f;
    const std::size_t before = diags.size();
    try {
        if (const auto b = rd.string(j, "builtin", path)) {
            f = *builtin_function(*b, n);
        } else {
            const auto variant = rd.string(j, "variant", path);
            if (!variant) {
                if (!j.contains("variant")) rd.error(path + "/variant", "missing variant (\"gaussian\" or \"pla\") or builtin name");
                return std::nullopt;
            }
            const double scale = rd.number(j, "scale", path).value_or(1.0);
            if (*variant == "gaussian") {
                const Vec center = rd.matrix(j, "center", path, n, 1).value_or(Mat::Zero(n, 1)).col(0);
                const Mat q = rd.matrix(j, "precision", path, n, n).value_or(Mat::Identity(n, n));
                if (has_errors(diags, before)) return std::nullopt;
                try {
                    f = LogConcaveFn::gaussian(scale, center, q);
                } catch (const DomainError& e) {
                    const std::string msg = e.what();
                    rd.error(path + (msg.find("precision") != std::string::npos ? "/precision" : ""), msg);
                    return std::nullopt;
                }
            } else if (*variant == "pla") {
                const Mat slopes = rd.matrix(j, "slopes", path, -1, n).value_or(Mat::Zero(1, n));
                const Vec offsets = rd.matrix(j, "offsets", path, slopes.rows(), 1).value_or(Mat::Zero(slopes.rows(), 1)).col(0);
                const Mat cons = rd.matrix(j, "constraints", path, -1, n).value_or(Mat(0, n));
                const Vec bounds = rd.matrix(j, "bounds", path, cons.rows(), 1).value_or(Mat::Zero(cons.rows(), 1)).col(0);
                if (has_errors(diags, before)) return std::nullopt;
                f = LogConcaveFn::pla(scale, slopes, offsets, cons, bounds);
            } else {
                rd.error(path + "/variant", "unknown variant '" + *variant + "'");
                return std::nullopt;
            }
        }
        if (f && j.contains("affine")) {
            const Json& a = j.at("affine");
            const std::string ap = path + "/affine";
            const Mat lin = rd.matrix(a, "linear", ap, n, n).value_or(Mat::Identity(n, n));
            const Vec shift = rd.matrix(a, "shift", ap, n, 1).value_or(Mat::Zero(n, 1)).col(0);
            if (has_errors(diags, before)) return std::nullopt;
            try {
                f = affine_image(*f, lin, shift);
            } catch (const DomainError& e) {
                rd.error(ap + "/linear", e.what());
                return std::nullopt;
            }
        }
    } catch (const DomainError& e) {
        rd.error(path, e.what());
        return std::nullopt;
    } catch (const SolverError& e) {
        rd.error(path, std::string("solver failure while building the function: ") + e.what());
        return std::nullopt;
    }
    return f;
}

// ---------------------------------------------------------------------------
// Config

struct CheckParams {
    double c0 = 1.7;
    double l_sup = 1.0;
    double slab = 0.02;
    int maps = 1;
};

struct TaskSpec {
    enum class Kind { compute, check, suite } kind = Kind::check;
    std::string name;  // functional, check_id or preset
    Json args = Json::object();
    std::string where;
};

struct ExperimentConfig {
    std::uint64_t seed = 0;
    Budget budget;
    CheckParams params;
    std::string out_dir = "runs";
    std::vector<NamedFn> functions;
    std::vector<TaskSpec> tasks;

    [[nodiscard]] const NamedFn* function(const std::string& name) const {
        for (const auto& f : functions)
            if (f.label == name) return &f;
        return nullptr;
    }
};

inline const std::vector<std::string>& compute_functionals() {
    static const std::vector<std::string> list{"norm", "quermassintegral", "variation", "subspace_norm", "steiner",
                                               "john", "irat", "isotropic_constant", "section_power_mean", "sup"};
    return list;
}

inline const std::vector<std::string>& suite_presets() {
    static const std::vector<std::string> list{"paper-core", "steiner", "positions"};
    return list;
}

namespace detail {

inline bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

inline std::string joined(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
    return s;
}

inline void validate_k(Reader& rd, const Json& t, const std::string& where, int n, int lo, int hi, bool required) {
    const auto k = rd.integer(t, "k", where);
    if (!k) {
        if (required && !t.contains("k")) rd.error(where + "/k", "missing subspace dimension k");
        return;
    }
    if (n > 0 && (*k < lo || *k > hi))
        rd.error(where + "/k", "k = " + std::to_string(*k) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

inline void validate_check(Reader& rd, const ExperimentConfig& cfg, const TaskSpec& t) {
    const Json& a = t.args;
    const std::string& id = t.name;
    const std::string& w = t.where;
    if (!is_check_id(id)) {
        rd.error(w + "/check", "unknown check_id '" + id + "'");
        return;
    }
    if (is_exact_row(id)) {
        const auto n = rd.integer(a, "n", w);
        if (!n) {
            if (!a.contains("n")) rd.error(w + "/n", "missing dimension n");
            return;
        }
        if (*n < 1 || *n > 30) rd.error(w + "/n", "n must be between 1 and 30");
        if (id == "b_bound") validate_k(rd, a, w, static_cast<int>(*n), 0, static_cast<int>(*n) - 1, true);
        else validate_k(rd, a, w, static_cast<int>(*n), 1, static_cast<int>(*n) - 1, true);
        if (const auto c0 = rd.number(a, "c0", w); c0 && !(*c0 > 0.0)) rd.error(w + "/c0", "c0 must be positive");
        return;
    }
    int n = 0;
    auto need_fn = [&](const char* key) -> const NamedFn* {
        const auto name = rd.string(a, key, w);
        if (!name) {
            if (!a.contains(key)) rd.error(w + "/" + key, std::string("missing input function ") + key);
            return nullptr;
        }
        const NamedFn* f = cfg.function(*name);
        if (!f) rd.error(w + "/" + key, "undefined function '" + *name + "'");
        return f;
    };
    const NamedFn* f1 = need_fn("f1");
    if (f1) n = (*f1)->dim();
    if (needs_pair(id)) {
        const NamedFn* f2 = need_fn("f2");
        if (f1 && f2 && (*f2)->dim() != n) rd.error(w + "/f2", "f1 and f2 have different dimensions");
    } else if (a.contains("f2")) {
        rd.warning(w + "/f2", "check takes a single function; f2 ignored");
    }
    if (f1 && n < 2 && id != "irat_bound") rd.error(w + "/f1", "check needs dimension n >= 2");
    const bool k_free = id == "sobolev" || id == "irat_bound" || id == "reverse_sobolev" || id == "t1" ||
                        id == "cor32_a" || id == "cor32_b";
    if (k_free) {
        if (a.contains("k")) rd.warning(w + "/k", "check has no subspace dimension; k ignored");
    } else if (id == "w_monotone" || id == "w_mass_bound") {
        validate_k(rd, a, w, n, 0, n - 1, true);
    } else if (id == "alexandrov_general") {
        validate_k(rd, a, w, n, 1, n - 1, true);
        const auto j = rd.integer(a, "j", w);
        const auto k = rd.integer(a, "k", w);
        if (!j && !a.contains("j")) rd.error(w + "/j", "missing index j");
        if (j && k && (*j < 0 || *j >= *k)) rd.error(w + "/j", "need 0 <= j < k");
    } else {
        validate_k(rd, a, w, n, 1, n - 1, true);
    }
    if (f1 && id == "grinberg_classical" && !(*f1)->is_indicator())
        rd.error(w + "/f1", "grinberg_classical needs a polytope indicator");
    if (a.contains("map")) {
        if (id != "phi_invariance" && id != "shephard_invariance") rd.warning(w + "/map", "map ignored by this check");
        else if (n > 0) (void)rd.matrix(a, "map", w, n, n);
    }
    for (const char* key : {"l_sup", "c0", "slab"})
        if (const auto v = rd.number(a, key, w); v && !(*v > 0.0)) rd.error(w + "/" + key, std::string(key) + " must be positive");
}

inline void validate_compute(Reader& rd, const ExperimentConfig& cfg, const TaskSpec& t) {
    const Json& a = t.args;
    const std::string& w = t.where;
    if (!contains(compute_functionals(), t.name)) {
        rd.error(w + "/compute", "unknown functional '" + t.name + "' (expected one of " + joined(compute_functionals()) + ")");
        return;
    }
    const auto name = rd.string(a, "f", w);
    if (!name) {
        if (!a.contains("f")) rd.error(w + "/f", "missing input function f");
        return;
    }
    const NamedFn* f = cfg.function(*name);
    if (!f) {
        rd.error(w + "/f", "undefined function '" + *name + "'");
        return;
    }
    const int n = (*f)->dim();
    if (t.name == "norm" && a.contains("p")) {
        const Json& p = a.at("p");
        if (!(p.is_number() && p.get<double>() > 0.0) && !(p.is_string() && p.get<std::string>() == "inf"))
            rd.error(w + "/p", "p must be positive or \"inf\"");
    }
    if (t.name == "quermassintegral") {
        const auto j = rd.integer(a, "j", w);
        if (!j && !a.contains("j")) rd.error(w + "/j", "missing index j");
        if (j && (*j < 0 || *j > n)) rd.error(w + "/j", "j must lie in [0, n]");
    }
    if (t.name == "subspace_norm" || t.name == "section_power_mean") validate_k(rd, a, w, n, 1, n - 1, true);
    if (t.name == "subspace_norm") {
        if (const auto m = rd.string(a, "mode", w); m && *m != "projection" && *m != "section")
            rd.error(w + "/mode", "mode must be \"projection\" or \"section\"");
        if (const auto k = rd.integer(a, "k", w); k && a.contains("basis")) (void)rd.matrix(a, "basis", w, n, *k);
    }
    if (t.name == "variation" && a.contains("direction")) (void)rd.matrix(a, "direction", w, n, 1);
}

inline void validate_suite(Reader& rd, const TaskSpec& t) {
    const Json& a = t.args;
    const std::string& w = t.where;
    if (!contains(suite_presets(), t.name)) {
        rd.error(w + "/suite", "unknown preset '" + t.name + "' (expected one of " + joined(suite_presets()) + ")");
        return;
    }
    if (a.contains("dims")) {
        const Json& d = a.at("dims");
        if (!d.is_array() || d.empty() ||
            !std::all_of(d.begin(), d.end(), [](const Json& x) { return x.is_number_integer() && (x == 2 || x == 3); }))
            rd.error(w + "/dims", "dims must be a non-empty subset of [2, 3]");
    }
    if (a.contains("functions")) {
        const Json& fs = a.at("functions");
        if (!fs.is_array() || fs.empty()) {
            rd.error(w + "/functions", "functions must be a non-empty array of built-in names");
        } else {
            for (std::size_t i = 0; i < fs.size(); ++i) {
                const bool known = fs[i].is_string() &&
                                   std::any_of(builtin::factories().begin(), builtin::factories().end(),
                                               [&](const auto& e) { return e.first == fs[i].get<std::string>(); });
                if (!known) rd.error(w + "/functions/" + std::to_string(i), "unknown built-in function");
            }
        }
    }
}

}  // namespace detail

/// Parses and validates; every violation becomes a diagnostic. The config is usable iff no errors.
inline ExperimentConfig parse_config(const std::string& text, std::vector<Diagnostic>& diags) {
    ExperimentConfig cfg;
    detail::Reader rd(diags);
    Json root;
    try {
        root = Json::parse(text);
    } catch (const Json::parse_error& e) {
        std::string msg = e.what();
        if (const auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
        rd.error(detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1), msg);
        return cfg;
    }
    if (!root.is_object()) {
        rd.error("", "config must be a JSON object");
        return cfg;
    }
    rd.unknown_keys(root, "", {"seed", "budget", "params", "output", "functions", "tasks", "description"});
    if (root.contains("seed")) {
        const Json& s = root.at("seed");
        if (s.is_number_unsigned()) cfg.seed = s.get<std::uint64_t>();
        else if (s.is_number_integer() && s.get<long long>() >= 0) cfg.seed = static_cast<std::uint64_t>(s.get<long long>());
        else rd.error("/seed", "seed must be a non-negative 64-bit integer");
    } else {
        rd.warning("/seed", "no seed given; using 0");
    }
    if (root.contains("budget")) {
        const Json& b = root.at("budget");
        if (!b.is_object()) {
            rd.error("/budget", "budget must be an object");
        } else {
            rd.unknown_keys(b, "/budget", {"samples", "frames", "force_mc"});
            if (const auto s = rd.integer(b, "samples", "/budget")) {
                if (*s <= 0) rd.error("/budget/samples", "samples must be positive");
                else cfg.budget.samples = static_cast<std::size_t>(*s);
            }
            if (const auto fr = rd.integer(b, "frames", "/budget")) {
                if (*fr < 2) rd.error("/budget/frames", "frames must be at least 2");
                else cfg.budget.frames = static_cast<std::size_t>(*fr);
            }
            if (b.contains("force_mc")) {
                if (!b.at("force_mc").is_boolean()) rd.error("/budget/force_mc", "expected a boolean");
                else cfg.budget.force_mc = b.at("force_mc").get<bool>();
            }
        }
    }
    if (root.contains("params")) {
        const Json& p = root.at("params");
        rd.unknown_keys(p, "/params", {"c0", "l_sup", "slab", "maps"});
        for (auto [key, dst] : {std::pair{"c0", &cfg.params.c0}, {"l_sup", &cfg.params.l_sup}, {"slab", &cfg.params.slab}})
            if (const auto v = rd.number(p, key, "/params")) {
                if (*v > 0.0) *dst = *v;
                else rd.error(std::string("/params/") + key, "must be positive");
            }
        if (const auto m = rd.integer(p, "maps", "/params")) {
            if (*m >= 1) cfg.params.maps = static_cast<int>(*m);
            else rd.error("/params/maps", "must be at least 1");
        }
    }
    if (root.contains("output")) {
        if (const auto d = rd.string(root.at("output"), "dir", "/output")) cfg.out_dir = *d;
    }
    if (root.contains("functions")) {
        const Json& fs = root.at("functions");
        if (!fs.is_object()) {
            rd.error("/functions", "functions must be an object mapping names to specs");
        } else {
            for (const auto& [name, spec] : fs.items()) {
                if (auto f = parse_function_spec(spec, "/functions/" + name, diags)) cfg.functions.push_back(named(name, std::move(*f)));
            }
        }
    }
    if (!root.contains("tasks") || !root.at("tasks").is_array()) {
        if (root.contains("tasks")) rd.error("/tasks", "tasks must be an array");
        else rd.warning("/tasks", "no tasks given");
        return cfg;
    }
    const Json& tasks = root.at("tasks");
    if (tasks.empty()) rd.warning("/tasks", "empty task list");
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const std::string w = "/tasks/" + std::to_string(i);
        const Json& t = tasks[i];
        if (!t.is_object()) {
            rd.error(w, "task must be an object");
            continue;
        }
        const int kinds = static_cast<int>(t.contains("compute")) + t.contains("check") + t.contains("suite");
        if (kinds != 1) {
            rd.error(w, "task needs exactly one of \"compute\", \"check\", \"suite\"");
            continue;
        }
        TaskSpec spec;
        spec.where = w;
        spec.args = t;
        const char* key = t.contains("compute") ? "compute" : t.contains("check") ? "check" : "suite";
        spec.kind = t.contains("compute") ? TaskSpec::Kind::compute : t.contains("check") ? TaskSpec::Kind::check : TaskSpec::Kind::suite;
        const auto name = rd.string(t, key, w);
        if (!name) continue;
        spec.name = *name;
        const std::size_t before = diags.size();
        if (spec.kind == TaskSpec::Kind::check) detail::validate_check(rd, cfg, spec);
        else if (spec.kind == TaskSpec::Kind::compute) detail::validate_compute(rd, cfg, spec);
        else detail::validate_suite(rd, spec);
        if (!has_errors(diags, before)) cfg.tasks.push_back(std::move(spec));
    }
    return cfg;
}

inline std::vector<Diagnostic> validate_config(const std::string& text) {
    std::vector<Diagnostic> diags;
    (void)parse_config(text, diags);
    return diags;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// ---------------------------------------------------------------------------
// Jobs

enum class PairKind { none, shephard, milman };

struct Job {
    enum class Kind { compute, check } kind = Kind::check;
    std::string name;   // functional or check_id
    std::string task;   // originating task pointer
    std::optional<NamedFn> f1, f2;
    PairKind pair = PairKind::none;  // derive (f1, f2) from f1 at run time
    CheckInputs inputs;
    Json args = Json::object();
};

/// One computed value. Rows from the same job share task and functional.
struct ValueRow {
    std::string functional;
    std::string f;
    int n = 0;
    std::string param;
    Estimate value;
    std::uint64_t seed = 0;
};

struct JobResult {
    std::optional<CheckReport> check;
    std::vector<ValueRow> values;
    std::string error_kind;  // empty, "hypothesis", "domain", "solver" or "internal"
    std::string error;
};

namespace detail {

inline std::vector<int> suite_dims(const Json& a) {
    if (!a.contains("dims")) return {2, 3};
    return a.at("dims").get<std::vector<int>>();
}

inline std::vector<std::string> suite_functions(const Json& a, const std::vector<std::string>& fallback) {
    if (!a.contains("functions")) return fallback;
    return a.at("functions").get<std::vector<std::string>>();
}

inline std::vector<std::string> all_builtin_names() {
    std::vector<std::string> out;
    for (const auto& e : builtin::factories()) out.push_back(e.first);
    return out;
}

inline Job check_job(const std::string& task, const std::string& id, const NamedFn& f, int k, PairKind pair = PairKind::none) {
    Job j;
    j.kind = Job::Kind::check;
    j.name = id;
    j.task = task;
    j.f1 = f;
    j.pair = pair;
    j.inputs.k = k;
    return j;
}

inline void expand_paper_core(const TaskSpec& t, const CheckParams& params, std::vector<Job>& out) {
    for (int n : suite_dims(t.args)) {
        for (const auto& name : suite_functions(t.args, all_builtin_names())) {
            const NamedFn f = builtin_function(name, n);
            auto add = [&](const std::string& id, int k, PairKind pair = PairKind::none) {
                Job j = check_job(t.where, id, f, k, pair);
                j.inputs.slab = params.slab;
                j.inputs.maps = params.maps;
                out.push_back(std::move(j));
            };
            add("sobolev", -1);
            for (int k = 1; k <= n - 1; ++k)
                for (int jj = 0; jj < k; ++jj) {
                    add("alexandrov_general", k);
                    out.back().inputs.j = jj;
                }
            for (int k = 1; k <= n - 1; ++k) add("alexandrov_norm", k);
            add("irat_bound", -1);
            add("reverse_sobolev", -1);
            for (int k = 0; k <= n - 1; ++k) add("w_monotone", k);
            for (int k = 0; k <= n - 1; ++k) add("w_mass_bound", k);
            for (int k = 1; k <= n - 1; ++k) {
                add("lemma49", k);
                add("grinberg_functional", k);
                if (f->is_indicator()) add("grinberg_classical", k);
                add("marginal_section", k);
                add("phi_invariance", k);
            }
            add("t1", -1, PairKind::shephard);
            add("cor32_a", -1, PairKind::shephard);
            add("cor32_b", -1, PairKind::shephard);
            for (int k = 1; k <= n - 1; ++k) {
                add("t2", k, PairKind::shephard);
                add("cor48", k, PairKind::shephard);
                add("shephard_invariance", k, PairKind::shephard);
                add("t3", k, PairKind::milman);
            }
        }
    }
    for (int n = 1; n <= 12; ++n)
        for (int k = 0; k < n; ++k) {
            Job j;
            j.name = "b_bound";
            j.task = t.where;
            j.inputs.n = n;
            j.inputs.k = k;
            out.push_back(j);
            if (k >= 1) {
                j.name = "omega_ratio";
                j.inputs.c0 = params.c0;
                out.push_back(j);
            }
        }
}

inline Job compute_job(const std::string& task, const std::string& functional, const NamedFn& f, Json args = Json::object()) {
    Job j;
    j.kind = Job::Kind::compute;
    j.name = functional;
    j.task = task;
    j.f1 = f;
    j.args = std::move(args);
    return j;
}

}  // namespace detail

inline std::vector<Job> expand_jobs(const ExperimentConfig& cfg) {
    std::vector<Job> out;
    for (const TaskSpec& t : cfg.tasks) {
        const Json& a = t.args;
        if (t.kind == TaskSpec::Kind::suite) {
            if (t.name == "paper-core") {
                detail::expand_paper_core(t, cfg.params, out);
            } else if (t.name == "steiner") {
                const std::vector<std::string> fallback{"gaussian", "cube", "box", "simplex", "ball"};
                for (int n : detail::suite_dims(a))
                    for (const auto& name : detail::suite_functions(a, fallback))
                        out.push_back(detail::compute_job(t.where, "steiner", builtin_function(name, n), {{"reference", true}}));
            } else {
                for (int n : detail::suite_dims(a))
                    for (const auto& name : detail::suite_functions(a, detail::all_builtin_names())) {
                        const NamedFn f = builtin_function(name, n);
                        out.push_back(detail::compute_job(t.where, "john", f));
                        out.push_back(detail::compute_job(t.where, "isotropic_constant", f));
                        out.push_back(detail::check_job(t.where, "irat_bound", f, -1));
                        for (int k = 1; k <= n - 1; ++k) {
                            out.push_back(detail::check_job(t.where, "marginal_section", f, k));
                            out.back().inputs.slab = cfg.params.slab;
                        }
                    }
            }
            continue;
        }
        if (t.kind == TaskSpec::Kind::compute) {
            out.push_back(detail::compute_job(t.where, t.name, *cfg.function(a.at("f").get<std::string>()), a));
            continue;
        }
        Job j;
        j.kind = Job::Kind::check;
        j.name = t.name;
        j.task = t.where;
        j.args = a;
        if (a.contains("f1")) j.f1 = *cfg.function(a.at("f1").get<std::string>());
        if (needs_pair(t.name) && a.contains("f2")) j.f2 = *cfg.function(a.at("f2").get<std::string>());
        CheckInputs& in = j.inputs;
        in.n = a.value("n", j.f1 ? (*j.f1)->dim() : 0);
        in.k = a.value("k", -1);
        in.j = a.value("j", -1);
        in.c0 = a.value("c0", cfg.params.c0);
        in.l_sup = a.value("l_sup", cfg.params.l_sup);
        in.slab = a.value("slab", cfg.params.slab);
        in.maps = a.value("maps", cfg.params.maps);
        if (a.contains("map") && j.f1) {
            std::vector<Diagnostic> ignored;
            detail::Reader rd(ignored);
            in.map = rd.matrix(a, "map", "", (*j.f1)->dim(), (*j.f1)->dim());
        }
        out.push_back(std::move(j));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Execution

namespace detail {

inline std::string param_string(const Json& args, std::initializer_list<const char*> keys) {
    std::string s;
    for (const char* k : keys)
        if (args.contains(k)) s += (s.empty() ? "" : ";") + std::string(k) + "=" + (args.at(k).is_string() ? args.at(k).get<std::string>() : args.at(k).dump());
    return s;
}

inline std::vector<ValueRow> run_compute(const Job& job, Workspace& ws) {
    const NamedFn& f = *job.f1;
    const int n = f->dim();
    const Json& a = job.args;
    const std::string param = param_string(a, {"p", "j", "k", "mode", "direction"});
    const SeededStream s = SeededStream{ws.seed(), 0}.derive("compute").derive(job.name).derive(f.label).derive(param);
    std::vector<ValueRow> rows;
    auto row = [&](const std::string& functional, const std::string& p, const Estimate& e) {
        rows.push_back({functional, f.label, n, p, e, ws.seed()});
    };
    if (job.name == "norm") {
        double p = 1.0;
        if (a.contains("p")) p = a.at("p").is_string() ? INFINITY : a.at("p").get<double>();
        row("norm", "p=" + (std::isinf(p) ? std::string("inf") : Workspace::key_number(p)), ws.norm(f, p));
    } else if (job.name == "sup") {
        row("sup", "", Estimate::exact(f->sup()));
    } else if (job.name == "quermassintegral") {
        const int j = a.at("j").get<int>();
        row("quermassintegral", "j=" + std::to_string(j), ws.quermass(f, j));
    } else if (job.name == "variation") {
        if (a.contains("direction")) {
            std::vector<Diagnostic> ignored;
            Reader rd(ignored);
            const Vec d = rd.matrix(a, "direction", "", n, 1)->col(0);
            row("variation", param, variation(*f, ws.budget(), s, d));
        } else {
            row("variation", "", ws.variation(f));
        }
    } else if (job.name == "subspace_norm") {
        const int k = a.at("k").get<int>();
        const RestrictMode mode = a.value("mode", std::string("projection")) == "section" ? RestrictMode::section : RestrictMode::projection;
        Frame h;
        if (a.contains("basis")) {
            std::vector<Diagnostic> ignored;
            Reader rd(ignored);
            h = span_frame(*rd.matrix(a, "basis", "", n, k));
        } else {
            h = sample_haar(n, k, s.derive("frame"));
        }
        row("subspace_norm", param, subspace_norm(*f, h, mode, ws.budget(), s.derive("norm")));
    } else if (job.name == "steiner") {
        const bool reference = a.value("reference", false);
        const SteinerFit fit = steiner_fit(*f, steiner_nodes(n), ws.budget(), s, reference);
        for (int j = 0; j <= n; ++j) {
            const Estimate c{fit.coefficients(j), fit.coefficient_se(j), fit.masses.front().n_samples * fit.masses.size(),
                             fit.coefficient_se(j) > 0.0 ? Method::mc_importance : Method::closed_form};
            row("steiner_c" + std::to_string(j), "j=" + std::to_string(j), c);
            if (reference && !fit.reference.empty()) row("steiner_ref" + std::to_string(j), "j=" + std::to_string(j), fit.reference[static_cast<std::size_t>(j)]);
        }
    } else if (job.name == "john") {
        const auto j = ws.john(f);
        row("john_a", "", Estimate::exact(j->a));
        row("john_ellipsoid_volume", "", Estimate::exact(unit_ball_volume(n) * std::abs(j->e.determinant())));
        row("john_mass", "", Estimate::exact(j->value_mass));
        row("john_feasibility", "probes=500", Estimate::exact(john_feasibility(*f, *j, 500, s.derive("probes"))));
        row("irat", "", monomial(std::pow(j->value_mass, -1.0 / n), {{ws.norm(f, 1.0), 1.0 / n}}));
    } else if (job.name == "irat") {
        const auto j = ws.john(f);
        row("irat", "", monomial(std::pow(j->value_mass, -1.0 / n), {{ws.norm(f, 1.0), 1.0 / n}}));
    } else if (job.name == "isotropic_constant") {
        row("isotropic_constant", "", ws.isotropic(f)->constant);
    } else if (job.name == "section_power_mean") {
        const int k = a.at("k").get<int>();
        const SectionPowerMean m = ws.sections(f, k);
        row("section_power_mean", "k=" + std::to_string(k), m.raw);
        row("phi_tilde", "k=" + std::to_string(k), m.phi_tilde);
    } else {
        throw DomainError("unknown functional '" + job.name + "'");
    }
    return rows;
}

}  // namespace detail

inline JobResult run_job(const Job& job, Workspace& ws) {
    JobResult r;
    try {
        if (job.kind == Job::Kind::compute) {
            r.values = detail::run_compute(job, ws);
        } else {
            CheckInputs in = job.inputs;
            in.f1 = job.f1;
            in.f2 = job.f2;
            if (job.pair == PairKind::shephard) std::tie(in.f1, in.f2) = ws.shephard_pair(*job.f1);
            if (job.pair == PairKind::milman) std::tie(in.f1, in.f2) = ws.milman_pair(*job.f1);
            r.check = run_check(job.name, in, ws);
            if (job.pair != PairKind::none)
                r.check->metadata["pair"] = job.pair == PairKind::shephard ? "dilation by 1.25 (holds by construction)"
                                                                           : "0.05-contraction of the centred function (sampled hypothesis)";
        }
    } catch (const HypothesisError& e) {
        r.error_kind = "hypothesis";
        r.error = e.what();
    } catch (const DomainError& e) {
        r.error_kind = "domain";
        r.error = e.what();
    } catch (const SolverError& e) {
        r.error_kind = "solver";
        r.error = e.what();
    } catch (const std::exception& e) {
        r.error_kind = "internal";
        r.error = e.what();
    }
    return r;
}

struct RunSummary {
    std::size_t checks = 0, pass = 0, fail = 0, inconclusive = 0, ratio_only = 0, values = 0, errors = 0, internal = 0;

    [[nodiscard]] int exit_code() const {
        if (internal > 0) return 3;
        return fail > 0 || errors > 0 ? 1 : 0;
    }
};

struct RunResult {
    std::vector<Job> jobs;
    std::vector<JobResult> results;
    RunSummary summary;
};

/// Runs every job; up to `jobs` run concurrently. Output never depends on `jobs`.
inline RunResult run_experiment(const ExperimentConfig& cfg, unsigned jobs) {
    RunResult out;
    out.jobs = expand_jobs(cfg);
    Budget b = cfg.budget;
    b.jobs = out.jobs.size() == 1 ? std::max(1u, jobs) : 1;  // a lone job parallelizes internally
    Workspace ws(b, cfg.seed);
    out.results.resize(out.jobs.size());
    parallel_for(out.jobs.size(), std::max(1u, jobs), [&](std::size_t i) { out.results[i] = run_job(out.jobs[i], ws); });
    RunSummary& s = out.summary;
    for (const JobResult& r : out.results) {
        if (!r.error_kind.empty()) {
            ++s.errors;
            if (r.error_kind == "internal") ++s.internal;
        }
        s.values += r.values.size();
        if (!r.check) continue;
        ++s.checks;
        switch (r.check->verdict) {
            case Verdict::pass: ++s.pass; break;
            case Verdict::fail: ++s.fail; break;
            case Verdict::inconclusive: ++s.inconclusive; break;
            case Verdict::ratio_only: ++s.ratio_only; break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Report files

inline std::string values_header() { return "functional,f,n,param,value,std_error,method,samples,seed"; }

inline std::string to_csv_row(const ValueRow& v) {
    return v.functional + "," + v.f + "," + std::to_string(v.n) + "," + v.param + "," + csv_number(v.value.value) + "," +
           csv_number(v.value.std_error) + "," + to_string(v.value.method) + "," + std::to_string(v.value.n_samples) + "," +
           std::to_string(v.seed);
}

/// Check rows, with errored check jobs as rows carrying verdict "error".
inline std::string summary_csv(const RunResult& r, std::uint64_t seed) {
    std::string s = csv_header() + "\n";
    for (std::size_t i = 0; i < r.jobs.size(); ++i) {
        const Job& j = r.jobs[i];
        if (j.kind != Job::Kind::check) continue;
        if (r.results[i].check) {
            s += to_csv_row(*r.results[i].check) + "\n";
        } else {
            const int n = j.f1 ? (*j.f1)->dim() : j.inputs.n;
            s += j.name + "," + std::to_string(n) + "," + (j.inputs.k >= 0 ? std::to_string(j.inputs.k) : "") +
                 ",nan,nan,nan,nan,error," + std::to_string(seed) + ",0\n";
        }
    }
    return s;
}

inline std::string values_csv(const RunResult& r) {
    std::string s = values_header() + "\n";
    for (const JobResult& res : r.results)
        for (const ValueRow& v : res.values) s += to_csv_row(v) + "\n";
    return s;
}

inline Json report_json(const ExperimentConfig& cfg, const RunResult& r) {
    Json j;
    j["seed"] = cfg.seed;
    j["budget"] = {{"samples", cfg.budget.samples}, {"frames", cfg.budget.frames}, {"force_mc", cfg.budget.force_mc}};
    const RunSummary& s = r.summary;
    j["summary"] = {{"checks", s.checks}, {"pass", s.pass}, {"fail", s.fail}, {"inconclusive", s.inconclusive},
                    {"ratio_only", s.ratio_only}, {"values", s.values}, {"errors", s.errors}};
    Json checks = Json::array(), values = Json::array(), errors = Json::array();
    for (std::size_t i = 0; i < r.jobs.size(); ++i) {
        const JobResult& res = r.results[i];
        if (res.check) {
            Json c = to_json(*res.check);
            c["task"] = r.jobs[i].task;
            checks.push_back(std::move(c));
        }
        for (const ValueRow& v : res.values) {
            Json e = to_json(v.value);
            values.push_back({{"task", r.jobs[i].task}, {"functional", v.functional}, {"f", v.f}, {"n", v.n},
                              {"param", v.param}, {"estimate", e}, {"seed", v.seed}});
        }
        if (!res.error_kind.empty())
            errors.push_back({{"task", r.jobs[i].task}, {"job", r.jobs[i].name},
                              {"f", r.jobs[i].f1 ? Json(r.jobs[i].f1->label) : Json(nullptr)},
                              {"k", r.jobs[i].inputs.k}, {"kind", res.error_kind}, {"message", res.error}});
    }
    j["checks"] = std::move(checks);
    j["values"] = std::move(values);
    j["errors"] = std::move(errors);
    return j;
}

/// Creates the next free out_dir/run-NNN and writes report.json, summary.csv and values.csv into it.
inline std::filesystem::path write_run(const std::filesystem::path& out_dir, const ExperimentConfig& cfg, const RunResult& r,
                                       const std::string& config_text) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    fs::path dir;
    for (int i = 1;; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "run-%03d", i);
        dir = out_dir / name;
        if (fs::create_directory(dir)) break;
        if (i > 99999) throw std::runtime_error("no free run directory under " + out_dir.string());
    }
    auto write = [&](const char* name, const std::string& content) {
        std::ofstream o(dir / name, std::ios::binary);
        o << content;
        if (!o) throw std::runtime_error("cannot write " + (dir / name).string());
    };
    write("config.json", config_text);
    write("report.json", report_json(cfg, r).dump(2) + "\n");
    write("summary.csv", summary_csv(r, cfg.seed));
    write("values.csv", values_csv(r));
    return dir;
}

}  // namespace lcg
