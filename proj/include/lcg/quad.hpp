#pragma once

// Integrals of log-concave functions and of their projections/sections, each with a
// standard error. Monte Carlo draws come in blocks of 256 samples; block b uses the
// counter stream stream.at(b), so results never depend on how blocks are scheduled.

#include "lcg/funcrep.hpp"

namespace lcg {

enum class Method { closed_form, mc_box, mc_importance, exact_polytope, mc_haar };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::closed_form: return "closed_form";
        case Method::mc_box: return "mc_box";
        case Method::mc_importance: return "mc_importance";
        case Method::exact_polytope: return "exact_polytope";
        case Method::mc_haar: return "mc_haar";
    }
    return "unknown";
}

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
    Method method = Method::closed_form;

    static Estimate exact(double v, Method m = Method::closed_form) { return {v, 0.0, 0, m}; }
};

struct Budget {
    std::size_t samples = 20000;  // Monte Carlo samples per integral
    std::size_t frames = 256;      // outer Haar frames for Grassmannian averages
    unsigned jobs = 1;
    bool force_mc = false;  // skip closed forms and exact polytope paths
};

inline constexpr std::size_t kBlock = 256;

/// Sampling density on R^k: uniform on a box, or proportional to exp(-rate |y - center|).
struct Proposal {
    enum class Kind { box, exponential };
    Kind kind = Kind::box;
    Box box;
    Vec center;
    double rate = 1.0;

    [[nodiscard]] int dim() const { return static_cast<int>(kind == Kind::box ? box.lo.size() : center.size()); }

    static Proposal uniform(Box b) { return {Kind::box, std::move(b), {}, 1.0}; }
    static Proposal exponential(Vec c, double rate) { return {Kind::exponential, {}, std::move(c), rate}; }
};

/// Draws y ~ proposal and returns (y, 1/q(y)).
inline std::pair<Vec, double> draw(const Proposal& p, std::mt19937_64& eng) {
    const int k = p.dim();
    if (p.kind == Proposal::Kind::box) {
        Vec y(k);
        for (int j = 0; j < k; ++j) y(j) = std::uniform_real_distribution<double>(p.box.lo(j), p.box.hi(j))(eng);
        return {y, p.box.volume()};
    }
    Vec dir = standard_normal_vector(k, eng);
    while (dir.norm() == 0.0) dir = standard_normal_vector(k, eng);
    dir.normalize();
    const double r = std::gamma_distribution<double>(k, 1.0 / p.rate)(eng);
    // q(y) = rate^k e^{-rate r} / (k omega_k Gamma(k))
    const double log_inv_q = std::log(static_cast<double>(k)) + std::log(unit_ball_volume(k)) + std::lgamma(k) -
                             k * std::log(p.rate) + p.rate * r;
    return {p.center + r * dir, std::exp(log_inv_q)};
}

struct WeightedSample {
    Mat points;  // k x N
    Vec weights;
};

/// Evaluates g(y)/q(y) at `samples` proposal draws; deterministic in (stream, samples) for any jobs.
template <class G>
WeightedSample draw_weighted(const Proposal& p, G&& g, std::size_t samples, const SeededStream& stream, unsigned jobs) {
    require(samples > 0, "Monte Carlo budget must be positive");
    WeightedSample out{Mat(p.dim(), static_cast<Eigen::Index>(samples)), Vec(static_cast<Eigen::Index>(samples))};
    const std::size_t blocks = (samples + kBlock - 1) / kBlock;
    parallel_for(blocks, jobs, [&](std::size_t b) {
        auto eng = stream.at(b).engine();
        const std::size_t end = std::min(samples, (b + 1) * kBlock);
        for (std::size_t i = b * kBlock; i < end; ++i) {
            auto [y, inv_q] = draw(p, eng);
            const double v = g(y);
            out.points.col(static_cast<Eigen::Index>(i)) = y;
            out.weights(static_cast<Eigen::Index>(i)) = v == 0.0 ? 0.0 : v * inv_q;
        }
    });
    return out;
}

inline Estimate mean_estimate(const Vec& w, Method m) {
    const double n = static_cast<double>(w.size());
    const double mean = w.mean();
    const double var = w.size() > 1 ? (w.array() - mean).square().sum() / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n), static_cast<std::size_t>(w.size()), m};
}

inline Method method_of(const Proposal& p) {
    return p.kind == Proposal::Kind::box ? Method::mc_box : Method::mc_importance;
}

/// Proposal for integrating f^power over R^n.
inline Proposal proposal_for(const LogConcaveFn& f, double power = 1.0) {
    if (f.bounded_support()) {
        const auto& p = f.pla_form();
        return Proposal::uniform(bounding_box(p.constraints, p.bounds));
    }
    const Envelope env = truncation_envelope(f, 1e-6);
    return Proposal::exponential(env.center, power * env.b);
}

/// Proposal for integrating a projection or section of f over frame coordinates.
inline Proposal proposal_for(const LogConcaveFn& f, const Frame& frame) {
    if (f.bounded_support()) {
        const auto& p = f.pla_form();
        return Proposal::uniform(bounding_box(p.constraints, p.bounds, frame.basis));
    }
    const Envelope env = truncation_envelope(f, 1e-6);
    return Proposal::exponential(frame.coords(env.center), env.b);
}

inline double gaussian_mass(const LogConcaveFn& g) {
    const int n = g.dim();
    return g.scale() * std::pow(2.0 * std::numbers::pi, 0.5 * n) / std::sqrt(g.eigenvalues().prod());
}

inline double polytope_indicator_volume(const LogConcaveFn& f) {
    const auto& p = f.pla_form();
    return polytope_volume(p.constraints, p.bounds);
}

inline Estimate lp_norm(const LogConcaveFn& f, double p, const Budget& budget, const SeededStream& stream) {
    if (std::isinf(p) && p > 0) return Estimate::exact(f.sup());
    require(std::isfinite(p) && p >= 1.0, "lp_norm: need p >= 1 or p = infinity");
    require(budget.samples > 0, "lp_norm: budget must be positive");
    if (!budget.force_mc) {
        if (f.is_gaussian()) return Estimate::exact(std::pow(gaussian_mass(pointwise_power(f, p)), 1.0 / p));
        if (f.is_indicator() && f.dim() <= 4)
            return Estimate::exact(f.scale() * std::pow(polytope_indicator_volume(f), 1.0 / p), Method::exact_polytope);
    }
    const Proposal prop = proposal_for(f, p);
    const auto ws = draw_weighted(prop, [&](const Vec& x) { const double v = f(x); return v == 0.0 ? 0.0 : std::pow(v, p); },
                                  budget.samples, stream, budget.jobs);
    Estimate integral = mean_estimate(ws.weights, method_of(prop));
    if (p == 1.0) return integral;
    const double v = std::pow(std::max(integral.value, 0.0), 1.0 / p);
    const double se = integral.value > 0.0 ? v / (p * integral.value) * integral.std_error : 0.0;
    return {v, se, integral.n_samples, integral.method};
}

/// ||P_H f||_{L^1(H)} or ||S_H f||_{L^1(H)}.
inline Estimate subspace_norm(const LogConcaveFn& f, const Frame& frame, RestrictMode mode, const Budget& budget,
                              const SeededStream& stream) {
    require_frame(frame, f.dim());
    require(budget.samples > 0, "subspace_norm: budget must be positive");
    const int n = f.dim();
    const int k = frame.k();
    if (k == 0) return Estimate::exact(mode == RestrictMode::projection ? f.sup() : f(Vec::Zero(n)));
    if (k == n) return lp_norm(f, 1.0, budget, stream);
    if (!budget.force_mc) {
        if (f.is_gaussian()) {
            const SubspaceView view(f, frame, mode);
            return Estimate::exact(gaussian_mass(*view.gaussian_reduction()));
        }
        if (f.is_indicator()) {
            const auto& p = f.pla_form();
            if (mode == RestrictMode::section && k <= 4)
                return Estimate::exact(p.scale * polytope_volume(p.constraints * frame.basis, p.bounds),
                                       Method::exact_polytope);
            if (mode == RestrictMode::projection && k <= 2) {
                std::vector<Vec> pts;
                for (const auto& v : enumerate_vertices(p.constraints, p.bounds)) pts.push_back(frame.coords(v.x));
                return Estimate::exact(p.scale * hull_volume_low_dim(pts), Method::exact_polytope);
            }
        }
    }
    const SubspaceView view(f, frame, mode);
    const Proposal prop = proposal_for(f, frame);
    const auto ws = draw_weighted(prop, view, budget.samples, stream, budget.jobs);
    return mean_estimate(ws.weights, method_of(prop));
}

struct Moments {
    double mass = 0.0;
    Vec mean;
    Mat cov;
};

inline Moments weighted_moments(const Mat& x, const Vec& w, std::size_t count) {
    const double total = w.sum();
    Moments m;
    m.mass = total / static_cast<double>(count);
    m.mean = x * w / total;
    const Mat c = x.colwise() - m.mean;
    m.cov = c * w.asDiagonal() * c.transpose() / total;
    m.cov = 0.5 * (m.cov + m.cov.transpose());
    return m;
}

struct MeanCov {
    Estimate mass;
    Vec mean;
    Mat cov;
    Vec mean_se;
    Mat cov_se;
    bool positive_definite = true;
    std::vector<Moments> groups;  // independent batches for batch-means errors of derived quantities
};

inline constexpr int kMomentGroups = 16;

/// Mass, mean and covariance of the probability density f / ||f||_1 (self-normalized Monte Carlo).
inline MeanCov mean_cov(const LogConcaveFn& f, const Budget& budget, const SeededStream& stream) {
    const int n = f.dim();
    MeanCov out;
    if (f.is_gaussian() && !budget.force_mc) {
        out.mass = Estimate::exact(gaussian_mass(f));
        out.mean = f.gaussian_form().center;
        out.cov = f.gaussian_form().precision.inverse();
        out.cov = 0.5 * (out.cov + out.cov.transpose());
        out.mean_se = Vec::Zero(n);
        out.cov_se = Mat::Zero(n, n);
        return out;
    }
    require(budget.samples >= kBlock * kMomentGroups / 4, "mean_cov: budget too small");
    const Proposal prop = proposal_for(f, 1.0);
    const auto ws = draw_weighted(prop, f, budget.samples, stream, budget.jobs);
    out.mass = mean_estimate(ws.weights, method_of(prop));
    const double total = ws.weights.sum();
    if (!(total > 0.0)) throw SolverError("mean_cov: all Monte Carlo weights vanished");
    const Moments all = weighted_moments(ws.points, ws.weights, ws.weights.size());
    out.mean = all.mean;
    out.cov = all.cov;
    const Mat c = ws.points.colwise() - out.mean;
    out.mean_se = Vec(n);
    for (int j = 0; j < n; ++j)
        out.mean_se(j) = std::sqrt((ws.weights.array().square() * c.row(j).transpose().array().square()).sum()) / total;
    out.cov_se = Mat(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const auto dev = (c.row(a).array() * c.row(b).array()).transpose() - out.cov(a, b);
            out.cov_se(a, b) = std::sqrt((ws.weights.array().square() * dev.square()).sum()) / total;
        }
    Eigen::SelfAdjointEigenSolver<Mat> es(out.cov);
    out.positive_definite = es.eigenvalues().minCoeff() > 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff());

    const std::size_t blocks = (budget.samples + kBlock - 1) / kBlock;
    for (int g = 0; g < kMomentGroups; ++g) {
        std::vector<Eigen::Index> idx;
        for (std::size_t b = static_cast<std::size_t>(g); b < blocks; b += kMomentGroups)
            for (std::size_t i = b * kBlock; i < std::min(budget.samples, (b + 1) * kBlock); ++i)
                idx.push_back(static_cast<Eigen::Index>(i));
        if (idx.empty()) continue;
        Mat x(n, static_cast<Eigen::Index>(idx.size()));
        Vec w(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t i = 0; i < idx.size(); ++i) {
            x.col(static_cast<Eigen::Index>(i)) = ws.points.col(idx[i]);
            w(static_cast<Eigen::Index>(i)) = ws.weights(idx[i]);
        }
        if (w.sum() > 0.0) out.groups.push_back(weighted_moments(x, w, idx.size()));
    }
    return out;
}

inline Estimate levelset_volume(const ConvexBodyDesc& body) {
    if (const auto* e = std::get_if<EllipsoidBody>(&body)) {
        const int n = static_cast<int>(e->center.size());
        return Estimate::exact(unit_ball_volume(n) / std::sqrt(e->shape.determinant()));
    }
    const auto& p = std::get<PolytopeBody>(body);
    require(polytope_bounded(p.a), "levelset_volume: polytope is unbounded");
    if (p.a.cols() <= 4) return Estimate::exact(polytope_volume(p.a, p.b), Method::exact_polytope);
    const Proposal prop = Proposal::uniform(bounding_box(p.a, p.b));
    const auto ws = draw_weighted(prop, [&](const Vec& x) { return ((p.a * x - p.b).array() <= 0.0).all() ? 1.0 : 0.0; },
                                  100000, SeededStream{0x701u, 0}, 1);
    return mean_estimate(ws.weights, Method::mc_box);
}

}  // namespace lcg
