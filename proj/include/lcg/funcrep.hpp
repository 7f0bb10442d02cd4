#pragma once

// Log-concave functions in two closed families:
//   Gaussian form            s * exp(-(x-m)^T Q (x-m) / 2)
//   piecewise log-affine     s * exp(-max_i (a_i.x + b_i))  on  P = {C x <= d},  0 outside
// and the pointwise operations built on them (dilation, projection and section values,
// level sets, affine images, powers, exponential envelopes).

#include "lcg/grassmann.hpp"
#include "lcg/nearest.hpp"
#include "lcg/polytope.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <variant>

namespace lcg {

inline constexpr double kConditionCap = 1e10;

struct GaussianForm {
    double scale = 1.0;
    Vec center;
    Mat precision;
};

struct PiecewiseLogAffine {
    double scale = 1.0;
    Mat slopes;  // p x n, row i is a_i
    Vec offsets;
    Mat constraints;  // r x n
    Vec bounds;
};

struct PolytopeBody {
    Mat a;
    Vec b;
};

/// {x : (x - center)^T shape (x - center) <= 1}
struct EllipsoidBody {
    Vec center;
    Mat shape;
};

using ConvexBodyDesc = std::variant<PolytopeBody, EllipsoidBody>;

class LogConcaveFn {
public:
    static LogConcaveFn gaussian(double scale, Vec center, Mat precision) {
        const auto n = center.size();
        require(n >= 1, "gaussian: dimension must be positive");
        require(precision.rows() == n && precision.cols() == n, "gaussian: precision must be n x n");
        require(std::isfinite(scale) && scale > 0.0, "gaussian: scale must be positive");
        require(center.allFinite() && precision.allFinite(), "gaussian: non-finite entries");
        const double asym = (precision - precision.transpose()).cwiseAbs().maxCoeff();
        require(asym <= 1e-10 * (1.0 + precision.cwiseAbs().maxCoeff()), "gaussian: precision matrix is not symmetric");
        Mat q = 0.5 * (precision + precision.transpose());
        Eigen::SelfAdjointEigenSolver<Mat> es(q);
        require(es.info() == Eigen::Success && es.eigenvalues().minCoeff() > 0.0,
                "gaussian: precision matrix is not positive definite");
        LogConcaveFn f;
        f.form_ = GaussianForm{scale, center, q};
        f.sup_ = scale;
        f.argmax_ = center;
        f.eigenvalues_ = es.eigenvalues();
        f.eigenvectors_ = es.eigenvectors();
        f.min_potential_ = 0.0;
        return f;
    }

    static LogConcaveFn pla(double scale, Mat slopes, Vec offsets, Mat constraints, Vec bounds) {
        const auto n = slopes.cols();
        require(n >= 1, "pla: dimension must be positive");
        require(slopes.rows() >= 1 && offsets.size() == slopes.rows(), "pla: need at least one affine piece");
        require(constraints.cols() == n && bounds.size() == constraints.rows(), "pla: constraint dimension mismatch");
        require(std::isfinite(scale) && scale > 0.0, "pla: scale must be positive");
        require(slopes.allFinite() && offsets.allFinite() && constraints.allFinite() && bounds.allFinite(),
                "pla: non-finite entries");
        LogConcaveFn f;
        f.indicator_ = slopes.cwiseAbs().maxCoeff() == 0.0;
        if (constraints.rows() > 0) {
            require(lp_feasible(constraints, bounds), "pla: domain polytope is empty");
            const auto ball = chebyshev_ball(constraints, bounds);
            require(ball && ball->radius > 1e-12, "pla: domain polytope has empty interior");
            f.bounded_ = polytope_bounded(constraints);
        }
        if (!f.bounded_) {
            Mat cone(constraints.rows() + slopes.rows(), n);
            cone << constraints, slopes;
            require(cone_is_trivial(cone), "pla: function is not integrable (potential does not grow along a recession direction)");
        }
        // sup: minimize t subject to a_i x + b_i <= t on P
        Mat lhs(slopes.rows() + constraints.rows(), n + 1);
        Vec rhs(lhs.rows());
        lhs << slopes, -Vec::Ones(slopes.rows()), constraints, Vec::Zero(constraints.rows());
        rhs << -offsets, bounds;
        Vec c = Vec::Zero(n + 1);
        c(n) = 1.0;
        const LpResult r = solve_lp(lhs, rhs, c);
        if (!r.optimal()) throw SolverError("pla: sup-norm LP failed");
        f.min_potential_ = r.x(n);
        f.argmax_ = r.x.head(n);
        f.sup_ = scale * std::exp(-f.min_potential_);
        f.form_ = PiecewiseLogAffine{scale, std::move(slopes), std::move(offsets), std::move(constraints), std::move(bounds)};
        return f;
    }

    static LogConcaveFn indicator(Mat constraints, Vec bounds, double height = 1.0) {
        const auto n = constraints.cols();
        return pla(height, Mat::Zero(1, n), Vec::Zero(1), std::move(constraints), std::move(bounds));
    }

    [[nodiscard]] int dim() const {
        return is_gaussian() ? static_cast<int>(gaussian_form().center.size())
                             : static_cast<int>(pla_form().slopes.cols());
    }
    [[nodiscard]] bool is_gaussian() const { return std::holds_alternative<GaussianForm>(form_); }
    [[nodiscard]] const GaussianForm& gaussian_form() const { return std::get<GaussianForm>(form_); }
    [[nodiscard]] const PiecewiseLogAffine& pla_form() const { return std::get<PiecewiseLogAffine>(form_); }
    [[nodiscard]] double scale() const { return is_gaussian() ? gaussian_form().scale : pla_form().scale; }

    /// Polytope indicator (all slopes zero), possibly with a height other than 1.
    [[nodiscard]] bool is_indicator() const { return !is_gaussian() && indicator_; }
    /// Piecewise log-affine with bounded domain.
    [[nodiscard]] bool bounded_support() const { return !is_gaussian() && bounded_; }

    [[nodiscard]] double sup() const { return sup_; }
    [[nodiscard]] const Vec& argmax() const { return argmax_; }
    /// min of the potential -log(f/scale).
    [[nodiscard]] double min_potential() const { return min_potential_; }
    [[nodiscard]] const Vec& eigenvalues() const { return eigenvalues_; }
    [[nodiscard]] const Mat& eigenvectors() const { return eigenvectors_; }

    /// max_i (a_i.x + b_i) ignoring the domain, or the Gaussian quadratic form / 2.
    [[nodiscard]] double raw_potential(const Vec& x) const {
        if (is_gaussian()) {
            const auto& g = gaussian_form();
            const Vec u = x - g.center;
            return 0.5 * u.dot(g.precision * u);
        }
        const auto& p = pla_form();
        return (p.slopes * x + p.offsets).maxCoeff();
    }

    [[nodiscard]] bool in_domain(const Vec& x) const {
        if (is_gaussian()) return true;
        const auto& p = pla_form();
        if (p.constraints.rows() == 0) return true;
        const Vec res = p.constraints * x - p.bounds;
        for (Eigen::Index i = 0; i < res.size(); ++i)
            if (res(i) > 1e-12 * (1.0 + std::abs(p.bounds(i)))) return false;
        return true;
    }

    /// -log(f(x)/scale); +inf outside the domain.
    [[nodiscard]] double potential(const Vec& x) const {
        if (!in_domain(x)) return std::numeric_limits<double>::infinity();
        return raw_potential(x);
    }

    [[nodiscard]] double operator()(const Vec& x) const {
        require(x.size() == dim(), "evaluate: dimension mismatch");
        if (!in_domain(x)) return 0.0;
        return scale() * std::exp(-raw_potential(x));
    }

    [[nodiscard]] std::string describe() const {
        std::ostringstream os;
        if (is_gaussian())
            os << "gaussian(n=" << dim() << ",s=" << scale() << ")";
        else
            os << (is_indicator() ? "indicator" : "pla") << "(n=" << dim() << ",pieces=" << pla_form().slopes.rows()
               << ",facets=" << pla_form().constraints.rows() << ",s=" << scale() << ")";
        return os.str();
    }

private:
    LogConcaveFn() = default;

    std::variant<GaussianForm, PiecewiseLogAffine> form_;
    double sup_ = 0.0;
    Vec argmax_;
    double min_potential_ = 0.0;
    bool indicator_ = false;
    bool bounded_ = false;
    Vec eigenvalues_;
    Mat eigenvectors_;
};

inline double evaluate(const LogConcaveFn& f, const Vec& x) { return f(x); }

struct SupNorm {
    double value;
    Vec argmax;
};

inline SupNorm sup_norm(const LogConcaveFn& f) { return {f.sup(), f.argmax()}; }

/// x -> f(A^{-1}(x - shift)).
inline LogConcaveFn affine_image(const LogConcaveFn& f, const Mat& a, const Vec& shift) {
    const int n = f.dim();
    require(a.rows() == n && a.cols() == n && shift.size() == n, "affine_image: dimension mismatch");
    Eigen::JacobiSVD<Mat> svd(a);
    const Vec sv = svd.singularValues();
    require(sv(n - 1) > 0.0 && sv(0) / sv(n - 1) <= kConditionCap, "affine_image: matrix is singular or ill-conditioned");
    const Mat ainv = a.fullPivLu().inverse();
    if (f.is_gaussian()) {
        const auto& g = f.gaussian_form();
        Mat q = ainv.transpose() * g.precision * ainv;
        return LogConcaveFn::gaussian(g.scale, a * g.center + shift, 0.5 * (q + q.transpose()));
    }
    const auto& p = f.pla_form();
    const Vec s = ainv * shift;
    return LogConcaveFn::pla(p.scale, p.slopes * ainv, p.offsets - p.slopes * s, p.constraints * ainv,
                             p.bounds + p.constraints * s);
}

inline LogConcaveFn translate(const LogConcaveFn& f, const Vec& shift) {
    return affine_image(f, Mat::Identity(f.dim(), f.dim()), shift);
}

inline LogConcaveFn pointwise_power(const LogConcaveFn& f, double p) {
    require(std::isfinite(p) && p > 0.0, "pointwise_power: exponent must be positive");
    if (f.is_gaussian()) {
        const auto& g = f.gaussian_form();
        return LogConcaveFn::gaussian(std::pow(g.scale, p), g.center, p * g.precision);
    }
    const auto& q = f.pla_form();
    return LogConcaveFn::pla(std::pow(q.scale, p), p * q.slopes, p * q.offsets, q.constraints, q.bounds);
}

/// c * f for c > 0.
inline LogConcaveFn scaled(const LogConcaveFn& f, double c) {
    require(std::isfinite(c) && c > 0.0, "scaled: factor must be positive");
    if (f.is_gaussian()) {
        const auto& g = f.gaussian_form();
        return LogConcaveFn::gaussian(c * g.scale, g.center, g.precision);
    }
    const auto& q = f.pla_form();
    return LogConcaveFn::pla(c * q.scale, q.slopes, q.offsets, q.constraints, q.bounds);
}

inline ConvexBodyDesc level_set(const LogConcaveFn& f, double t) {
    require(std::isfinite(t) && t > 0.0, "level_set: level must be positive");
    require(t <= f.sup() * (1.0 + 1e-12), "level_set: level exceeds the sup norm (empty set)");
    if (f.is_gaussian()) {
        const auto& g = f.gaussian_form();
        const double r2 = 2.0 * std::log(g.scale / t);
        require(r2 > 0.0, "level_set: level equals the maximum of a Gaussian (degenerate singleton)");
        return EllipsoidBody{g.center, g.precision / r2};
    }
    const auto& p = f.pla_form();
    const double level = std::log(p.scale / t);
    std::vector<int> rows;
    for (int i = 0; i < p.slopes.rows(); ++i)
        if (p.slopes.row(i).cwiseAbs().maxCoeff() > 0.0) rows.push_back(i);
    Mat a(p.constraints.rows() + static_cast<Eigen::Index>(rows.size()), f.dim());
    Vec b(a.rows());
    a.topRows(p.constraints.rows()) = p.constraints;
    b.head(p.constraints.rows()) = p.bounds;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        a.row(p.constraints.rows() + i) = p.slopes.row(rows[i]);
        b(p.constraints.rows() + i) = level - p.offsets(rows[i]);
    }
    return PolytopeBody{a, b};
}

inline bool body_contains(const ConvexBodyDesc& body, const Vec& x, double tol = 0.0) {
    if (const auto* e = std::get_if<EllipsoidBody>(&body)) {
        const Vec u = x - e->center;
        return u.dot(e->shape * u) <= 1.0 + tol;
    }
    const auto& p = std::get<PolytopeBody>(body);
    return ((p.a * x - p.b).array() <= tol).all();
}

/// f(x) <= a * exp(-b |x - center|); the envelope mass outside the ball of `radius` about center is below tail_eps.
struct Envelope {
    double a = 0.0;
    double b = 0.0;
    double radius = 0.0;
    Vec center;
};

/// Mass of a * exp(-b|x|) outside the ball of radius r in R^n.
inline double envelope_tail(int n, double a, double b, double r) {
    if (n == 0) return 0.0;
    return a * n * unit_ball_volume(n) * boost::math::tgamma(static_cast<double>(n), b * r) / std::pow(b, n);
}

inline double envelope_radius(int n, double a, double b, double tail_eps) {
    double hi = n / b;
    while (envelope_tail(n, a, b, hi) >= tail_eps) hi *= 1.5;
    double lo = 0.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (envelope_tail(n, a, b, mid) >= tail_eps ? lo : hi) = mid;
    }
    return hi;
}

namespace detail {

// min over P of the potential restricted to {+-(y_j - c_j) >= r}; +inf when that part of P is empty.
inline double outer_potential_min(const PiecewiseLogAffine& p, const Vec& c, double r) {
    const int n = static_cast<int>(p.slopes.cols());
    const auto base = p.slopes.rows() + p.constraints.rows();
    Mat lhs(base + 1, n + 1);
    Vec rhs(base + 1);
    lhs.topRows(base) << p.slopes, -Vec::Ones(p.slopes.rows()), p.constraints, Vec::Zero(p.constraints.rows());
    rhs.head(base) << -p.offsets, p.bounds;
    Vec obj = Vec::Zero(n + 1);
    obj(n) = 1.0;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
        for (double sgn : {1.0, -1.0}) {
            lhs.row(base).setZero();
            lhs(base, j) = -sgn;
            rhs(base) = -sgn * c(j) - r;
            const LpResult res = solve_lp(lhs, rhs, obj);
            if (res.status == LpStatus::optimal) best = std::min(best, res.value);
            else if (res.status == LpStatus::unbounded) throw SolverError("envelope: potential unbounded below");
        }
    return best;
}

inline void verify_envelope(const LogConcaveFn& f, const Envelope& env) {
    const int n = f.dim();
    auto eng = SeededStream{0x5eed5eedULL, 0}.engine();
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    for (int i = 0; i < 256; ++i) {
        Vec dir = standard_normal_vector(n, eng);
        dir.normalize();
        const double r = 2.0 * env.radius * ud(eng);
        const Vec x = env.center + r * dir;
        const double bound = env.a * std::exp(-env.b * r);
        if (f(x) > bound * (1.0 + 1e-9) + 1e-300)
            throw SolverError("truncation_envelope: envelope violated at a probe point");
    }
    if (f(f.argmax()) > env.a * std::exp(-env.b * (f.argmax() - env.center).norm()) * (1.0 + 1e-9))
        throw SolverError("truncation_envelope: envelope violated at the maximizer");
}

}  // namespace detail

inline Envelope truncation_envelope(const LogConcaveFn& f, double tail_eps) {
    require(std::isfinite(tail_eps) && tail_eps > 0.0, "truncation_envelope: tail_eps must be positive");
    const int n = f.dim();
    Envelope env;
    if (f.is_gaussian()) {
        const auto& g = f.gaussian_form();
        env.center = g.center;
        env.a = g.scale * std::exp(0.5);
        env.b = std::sqrt(f.eigenvalues().minCoeff());
        env.radius = envelope_radius(n, env.a, env.b, tail_eps);
    } else if (f.bounded_support()) {
        const auto& p = f.pla_form();
        const auto verts = enumerate_vertices(p.constraints, p.bounds);
        if (verts.empty()) throw SolverError("truncation_envelope: no vertices for a bounded domain");
        env.center = Vec::Zero(n);
        for (const auto& v : verts) env.center += v.x;
        env.center /= static_cast<double>(verts.size());
        for (const auto& v : verts) env.radius = std::max(env.radius, (v.x - env.center).norm());
        env.b = 1.0 / env.radius;
        env.a = f.sup() * std::exp(1.0);
    } else {
        const auto& p = f.pla_form();
        env.center = f.argmax();
        const double root_n = std::sqrt(static_cast<double>(n));
        auto gap = [&](double r0) { return detail::outer_potential_min(p, env.center, r0 / root_n) - f.min_potential(); };
        double r0 = 1.0;
        double g = gap(r0);
        while (g < 0.5 && r0 < 1e8) {
            r0 *= 2.0;
            g = gap(r0);
        }
        while (g > 8.0 && r0 > 1e-8) {
            const double g2 = gap(0.5 * r0);
            if (g2 < 0.5) break;
            r0 *= 0.5;
            g = g2;
        }
        if (!(g > 0.0) || !std::isfinite(g)) throw SolverError("truncation_envelope: could not certify exponential decay");
        env.a = f.sup() * std::exp(g);
        env.b = g / r0;
        env.radius = envelope_radius(n, env.a, env.b, tail_eps);
    }
    detail::verify_envelope(f, env);
    return env;
}

namespace detail {

inline double solve_monotone(const std::function<double(double)>& g, double lo, double hi, double tol) {
    boost::uintmax_t iters = 200;
    auto stop = [tol](double a, double b) { return std::abs(b - a) <= tol * (1.0 + std::abs(a)); };
    const auto r = boost::math::tools::toms748_solve(g, lo, hi, stop, iters);
    return r.second;
}

}  // namespace detail

/// sup of f over the closed ball B(x, delta).
inline double dilate_value(const LogConcaveFn& f, double delta, const Vec& x) {
    require(std::isfinite(delta) && delta >= 0.0, "dilate_value: delta must be nonnegative");
    require(x.size() == f.dim(), "dilate_value: dimension mismatch");
    if (delta == 0.0) return f(x);
    if (f.is_gaussian()) {
        const auto& g = f.gaussian_form();
        const Vec z = f.eigenvectors().transpose() * (x - g.center);
        if (z.norm() <= delta) return g.scale;
        const Vec& lam = f.eigenvalues();
        auto excess = [&](double mu) {
            return (lam.array() * z.array() / (lam.array() + mu)).matrix().norm() - delta;
        };
        const double hi = (lam.array() * z.array()).matrix().norm() / delta;
        if (excess(hi) > 0.0) throw SolverError("dilate_value: trust-region bracket failed");
        const double mu = detail::solve_monotone(excess, 0.0, hi, 1e-14);
        const Vec w = (mu * z.array() / (lam.array() + mu)).matrix();
        return g.scale * std::exp(-0.5 * (lam.array() * w.array().square()).sum());
    }
    const auto& p = f.pla_form();
    const NearestPoint base = nearest_point(p.constraints, p.bounds, x);
    if (!base.feasible) throw SolverError("dilate_value: projection onto the domain failed");
    if (base.distance > delta) return 0.0;

    Mat g(p.constraints.rows() + p.slopes.rows(), f.dim());
    g << p.constraints, p.slopes;
    Vec h(g.rows());
    h.head(p.constraints.rows()) = p.bounds;
    auto dist_at = [&](double t) {
        h.tail(p.slopes.rows()) = Vec::Constant(p.slopes.rows(), t) - p.offsets;
        const NearestPoint np = nearest_point(g, h, x);
        return np.feasible ? np.distance : std::numeric_limits<double>::infinity();
    };
    double t_lo = f.min_potential();
    double d_lo = dist_at(t_lo);
    if (!std::isfinite(d_lo)) {
        t_lo += 1e-12 * (1.0 + std::abs(t_lo));
        d_lo = dist_at(t_lo);
    }
    if (d_lo <= delta) return p.scale * std::exp(-t_lo);
    const double t_hi = f.raw_potential(base.point);
    if (t_hi <= t_lo) return p.scale * std::exp(-t_lo);
    const double t = detail::solve_monotone([&](double s) { return std::min(dist_at(s), 1e300) - delta; }, t_lo, t_hi, 1e-10);
    return p.scale * std::exp(-t);
}

enum class RestrictMode { projection, section };

inline const char* to_string(RestrictMode m) { return m == RestrictMode::projection ? "projection" : "section"; }

/// f restricted to a subspace H (section) or maximized over translates of H-perp (projection),
/// as a function of frame coordinates y in R^k. Precomputes the per-frame algebra.
class SubspaceView {
public:
    SubspaceView(const LogConcaveFn& f, const Frame& frame, RestrictMode mode) : f_(&f), frame_(frame), mode_(mode) {
        require_frame(frame, f.dim());
        require(frame.k() >= 1, "SubspaceView: subspace dimension must be positive");
        const Mat& b = frame.basis;
        const Mat& w = frame.complement;
        if (f.is_gaussian()) {
            const auto& g = f.gaussian_form();
            const Mat qbb = b.transpose() * g.precision * b;
            if (mode == RestrictMode::projection || frame.k() == f.dim()) {
                Mat s = qbb;
                if (w.cols() > 0) {
                    const Mat qbc = b.transpose() * g.precision * w;
                    const Mat qcc = w.transpose() * g.precision * w;
                    s -= qbc * qcc.llt().solve(qbc.transpose());
                }
                reduced_ = std::make_shared<LogConcaveFn>(
                    LogConcaveFn::gaussian(g.scale, b.transpose() * g.center, 0.5 * (s + s.transpose())));
            } else {
                const Vec lin = b.transpose() * (g.precision * g.center);
                const Eigen::LLT<Mat> llt(qbb);
                const Vec ystar = llt.solve(lin);
                const double c0 = g.center.dot(g.precision * g.center) - lin.dot(ystar);
                reduced_ = std::make_shared<LogConcaveFn>(
                    LogConcaveFn::gaussian(g.scale * std::exp(-0.5 * std::max(c0, 0.0)), ystar, qbb));
            }
            return;
        }
        const auto& p = f.pla_form();
        ab_ = p.slopes * b;
        cb_ = p.constraints * b;
        if (mode == RestrictMode::projection && w.cols() > 0) {
            const int m = static_cast<int>(w.cols());
            lhs_.resize(p.slopes.rows() + p.constraints.rows(), m + 1);
            lhs_ << p.slopes * w, -Vec::Ones(p.slopes.rows()), p.constraints * w, Vec::Zero(p.constraints.rows());
            obj_ = Vec::Zero(m + 1);
            obj_(m) = 1.0;
        }
    }

    [[nodiscard]] const Frame& frame() const { return frame_; }
    [[nodiscard]] RestrictMode mode() const { return mode_; }
    [[nodiscard]] int k() const { return frame_.k(); }

    /// Closed-form k-dimensional Gaussian for Gaussian inputs, nullptr otherwise.
    [[nodiscard]] const LogConcaveFn* gaussian_reduction() const { return reduced_.get(); }

    [[nodiscard]] double operator()(const Vec& y) const {
        require(y.size() == k(), "restrict_value: dimension mismatch");
        if (reduced_) return (*reduced_)(y);
        const auto& p = f_->pla_form();
        const bool flat = mode_ == RestrictMode::section || frame_.complement.cols() == 0;
        if (flat) {
            const Vec res = cb_ * y - p.bounds;
            for (Eigen::Index i = 0; i < res.size(); ++i)
                if (res(i) > 1e-12 * (1.0 + std::abs(p.bounds(i)))) return 0.0;
            return p.scale * std::exp(-(ab_ * y + p.offsets).maxCoeff());
        }
        Vec rhs(lhs_.rows());
        rhs << -p.offsets - ab_ * y, p.bounds - cb_ * y;
        const LpResult r = solve_lp(lhs_, rhs, obj_);
        if (r.status == LpStatus::infeasible) return 0.0;
        if (!r.optimal()) throw SolverError("restrict_value: projection LP failed");
        return p.scale * std::exp(-r.value);
    }

private:
    const LogConcaveFn* f_;
    Frame frame_;
    RestrictMode mode_;
    std::shared_ptr<LogConcaveFn> reduced_;
    Mat ab_, cb_, lhs_;
    Vec obj_;
};

inline double restrict_value(const LogConcaveFn& f, const Frame& frame, const Vec& y, RestrictMode mode) {
    if (frame.k() == 0) {
        require_frame(frame, f.dim());
        return mode == RestrictMode::projection ? f.sup() : f(Vec::Zero(f.dim()));
    }
    return SubspaceView(f, frame, mode)(y);
}

}  // namespace lcg
