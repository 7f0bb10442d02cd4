#pragma once

// Geometric functionals of log-concave functions: quermassintegrals, the Steiner
// polynomial, variation, the John function, isotropic position, section power means,
// and the two exact constants (b_{n,k} and the unit-ball volume ratio).

#include "lcg/mvie.hpp"
#include "lcg/quad.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/rational.hpp>

#include <iomanip>

namespace lcg {

namespace detail {

// Inner budget for two-stage estimators: samples / sqrt(outer count), at least one block.
inline Budget inner_budget(const Budget& b) {
    Budget in = b;
    in.jobs = 1;
    in.samples = std::max<std::size_t>(
        kBlock, static_cast<std::size_t>(static_cast<double>(b.samples) / std::sqrt(static_cast<double>(b.frames))));
    return in;
}

inline Estimate outer_mean(const std::vector<double>& vals, std::size_t inner_samples) {
    const Vec w = Eigen::Map<const Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    Estimate e = mean_estimate(w, Method::mc_haar);
    e.n_samples = vals.size() * inner_samples;
    return e;
}

}  // namespace detail

/// W_j(f) = (omega_n / omega_k) E_H ||P_H f||_{L^1(H)}, k = n - j, H Haar on G(n,k).
/// With generic_endpoints the j = 0 and j = n cases also go through the frame average.
inline Estimate quermassintegral(const LogConcaveFn& f, int j, const Budget& budget, const SeededStream& stream,
                                 bool generic_endpoints = false) {
    const int n = f.dim();
    require(0 <= j && j <= n, "quermassintegral: need 0 <= j <= n");
    if (!generic_endpoints) {
        if (j == 0) return lp_norm(f, 1.0, budget, stream);
        if (j == n) return Estimate::exact(unit_ball_volume(n) * f.sup());
    }
    require(budget.frames >= 2, "quermassintegral: need at least two frames");
    const int k = n - j;
    const double ratio = unit_ball_volume(n) / unit_ball_volume(k);
    const Budget inner = detail::inner_budget(budget);
    std::vector<double> vals(budget.frames);
    parallel_for(budget.frames, budget.jobs, [&](std::size_t i) {
        const Frame h = k == 0 ? axis_frame(n, 0) : sample_haar(n, k, stream.derive("frame").at(i));
        vals[i] = ratio * subspace_norm(f, h, RestrictMode::projection, inner, stream.derive("inner").at(i)).value;
    });
    return detail::outer_mean(vals, inner.samples);
}

/// Total variation V(f) = n W_1(f), or the directional ||D_theta f||_TV = 2 ||P_{theta-perp} f||.
inline Estimate variation(const LogConcaveFn& f, const Budget& budget, const SeededStream& stream,
                          const std::optional<Vec>& direction = std::nullopt) {
    const int n = f.dim();
    if (direction) {
        require(direction->size() == n, "variation: dimension mismatch");
        Estimate e = subspace_norm(f, hyperplane_frame(*direction), RestrictMode::projection, budget, stream);
        e.value *= 2.0;
        e.std_error *= 2.0;
        return e;
    }
    Estimate e = quermassintegral(f, 1, budget, stream);
    e.value *= n;
    e.std_error *= n;
    return e;
}

// ---------------------------------------------------------------------------
// Steiner polynomial

struct SteinerFit {
    std::vector<double> deltas;
    std::vector<Estimate> masses;  // ||f_delta||_1
    Vec coefficients;              // c_0..c_n
    Vec coefficient_se;
    std::vector<Estimate> reference;  // C(n,j) W_j(f), empty unless requested
    double condition = 0.0;
};

/// Chebyshev-spaced nodes in (0, 0.5].
inline std::vector<double> steiner_nodes(int n) {
    const int m = n + 4;
    std::vector<double> d(m);
    for (int i = 0; i < m; ++i) d[i] = 0.25 + 0.25 * std::cos((2.0 * i + 1.0) * std::numbers::pi / (2.0 * m));
    std::sort(d.begin(), d.end());
    return d;
}

namespace detail {

// Unit directions for radial integration: exact pair in 1-D, a randomly shifted regular
// grid in 2-D, a randomly rotated spherical Fibonacci lattice in 3-D, iid otherwise.
inline std::vector<Vec> radial_directions(int n, std::size_t count, const SeededStream& stream) {
    std::vector<Vec> dirs;
    if (n == 1) return {Vec::Ones(1), -Vec::Ones(1)};
    auto eng = stream.engine();
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    if (n == 2) {
        const double shift = ud(eng);
        for (std::size_t i = 0; i < count; ++i) {
            const double t = 2.0 * std::numbers::pi * (static_cast<double>(i) + shift) / static_cast<double>(count);
            dirs.push_back((Vec(2) << std::cos(t), std::sin(t)).finished());
        }
    } else if (n == 3) {
        const Mat r = sample_rotation(3, stream.derive("rotation"));
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (std::size_t i = 0; i < count; ++i) {
            const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
            const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden * static_cast<double>(i);
            dirs.push_back(r * (Vec(3) << s * std::cos(phi), s * std::sin(phi), z).finished());
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) dirs.push_back(sample_sphere(n, stream.at(i)));
    }
    return dirs;
}

// Radius at which the ray c + r theta leaves the delta-neighbourhood of {C x <= d}; c interior.
inline double dilated_radius(const Mat& c_mat, const Vec& d, const Vec& c, const Vec& theta, double delta) {
    double rho0 = std::numeric_limits<double>::infinity();
    const Vec speed = c_mat * theta;
    const Vec room = d - c_mat * c;
    for (Eigen::Index i = 0; i < speed.size(); ++i)
        if (speed(i) > 0.0) rho0 = std::min(rho0, room(i) / speed(i));
    if (!std::isfinite(rho0)) return rho0;
    if (delta == 0.0) return rho0;
    auto gap = [&](double r) {
        const NearestPoint np = nearest_point(c_mat, d, c + r * theta);
        if (!np.feasible) throw SolverError("steiner_fit: projection onto the domain failed");
        return np.distance - delta;
    };
    double hi = rho0 + 2.0 * delta;
    while (gap(hi) < 0.0) hi = rho0 + 2.0 * (hi - rho0);
    return solve_monotone(gap, rho0 + delta, hi, 1e-13);
}

}  // namespace detail

/// Fits ||f_delta||_1 = sum_j c_j delta^j by least squares over common random directions.
inline SteinerFit steiner_fit(const LogConcaveFn& f, std::vector<double> deltas, const Budget& budget,
                              const SeededStream& stream, bool with_reference = false) {
    const int n = f.dim();
    const int m = static_cast<int>(deltas.size());
    require(m >= n + 3, "steiner_fit: need at least n + 3 dilation radii");
    for (double d : deltas) require(d > 0.0 && d <= 0.5, "steiner_fit: radii must lie in (0, 0.5]");
    Mat v(m, n + 1);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= n; ++j) v(i, j) = std::pow(deltas[i], j);
    Eigen::JacobiSVD<Mat> svd(v);
    const double cond = svd.singularValues()(0) / svd.singularValues()(n);
    if (!(cond <= 1e8)) throw SolverError("steiner_fit: dilation radii too clustered (ill-conditioned fit)");
    const Mat pinv = v.completeOrthogonalDecomposition().pseudoInverse();

    const std::size_t count = std::max<std::size_t>(64, budget.samples / 8);
    const auto dirs = detail::radial_directions(n, count, stream.derive("directions"));
    const double wn = unit_ball_volume(n);
    Mat per_dir(m, static_cast<Eigen::Index>(dirs.size()));

    if (f.is_indicator()) {
        const auto& p = f.pla_form();
        const auto ball = chebyshev_ball(p.constraints, p.bounds);
        if (!ball) throw SolverError("steiner_fit: no interior point");
        parallel_for(dirs.size(), budget.jobs, [&](std::size_t i) {
            for (int r = 0; r < m; ++r) {
                const double rho = detail::dilated_radius(p.constraints, p.bounds, ball->center, dirs[i], deltas[r]);
                per_dir(r, static_cast<Eigen::Index>(i)) = p.scale * wn * std::pow(rho, n);
            }
        });
    } else {
        const Envelope env = truncation_envelope(f, 1e-10 * f.sup());
        const Vec& c = env.center;
        parallel_for(dirs.size(), budget.jobs, [&](std::size_t i) {
            for (int r = 0; r < m; ++r) {
                const double delta = deltas[r];
                double top = env.radius + delta;
                if (f.bounded_support()) {
                    const auto& p = f.pla_form();
                    top = std::min(top, detail::dilated_radius(p.constraints, p.bounds, c, dirs[i], delta));
                }
                auto g = [&](double s) {
                    return s == 0.0 && n > 1 ? 0.0 : dilate_value(f, delta, c + s * dirs[i]) * std::pow(s, n - 1);
                };
                using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
                const double split = std::min(delta, top);
                const double val = GK::integrate(g, 0.0, split, 8, 1e-8) + GK::integrate(g, split, top, 10, 1e-8);
                per_dir(r, static_cast<Eigen::Index>(i)) = n * wn * val;
            }
        });
    }

    SteinerFit out;
    out.deltas = deltas;
    out.condition = cond;
    for (int r = 0; r < m; ++r) out.masses.push_back(mean_estimate(per_dir.row(r).transpose(), Method::mc_importance));
    const Mat coef = pinv * per_dir;  // (n+1) x directions
    out.coefficients = coef.rowwise().mean();
    out.coefficient_se = Vec(n + 1);
    for (int j = 0; j <= n; ++j) out.coefficient_se(j) = mean_estimate(coef.row(j).transpose(), Method::mc_importance).std_error;
    if (with_reference)
        for (int j = 0; j <= n; ++j) {
            Estimate w = quermassintegral(f, j, budget, stream.derive("reference").at(static_cast<std::uint64_t>(j)));
            w.value *= binomial(n, j);
            w.std_error *= binomial(n, j);
            out.reference.push_back(w);
        }
    return out;
}

// ---------------------------------------------------------------------------
// John function

struct JohnFunction {
    double a = 1.0;
    double height = 0.0;      // a ||f||_inf
    EllipsoidBody ellipsoid;  // {x : (x - c)^T M (x - c) <= 1}
    Mat e;                    // ellipsoid = center + e B^n, e symmetric
    double value_mass = 0.0;  // ||E(f)||_1
    Mat position_linear;      // x -> position_linear x + position_shift maps the ellipsoid onto B^n
    Vec position_shift;
};

namespace detail {

struct JohnLevel {
    double a = 0.0;
    double objective = -1.0;  // a vol(MVIE), negative when the level set is degenerate
    Mvie body;
};

inline JohnLevel john_level(const LogConcaveFn& f, double a) {
    JohnLevel out;
    out.a = a;
    const ConvexBodyDesc body = level_set(f, std::min(a, 1.0) * f.sup());
    const auto& p = std::get<PolytopeBody>(body);
    try {
        out.body = mvie(p.a, p.b);
        out.objective = a * out.body.volume();
    } catch (const DomainError&) {
        out.objective = -1.0;
    }
    return out;
}

inline JohnFunction make_john(const LogConcaveFn& f, double a, const Vec& center, const Mat& e) {
    JohnFunction j;
    const int n = f.dim();
    j.a = a;
    j.height = a * f.sup();
    j.e = e;
    const Mat einv = e.inverse();
    j.ellipsoid = EllipsoidBody{center, einv.transpose() * einv};
    j.value_mass = j.height * unit_ball_volume(n) * std::abs(e.determinant());
    j.position_linear = einv;
    j.position_shift = -einv * center;
    return j;
}

}  // namespace detail

/// The John function a ||f||_inf 1_E: maximizes a vol(MVIE(A_{a||f||_inf}(f))) over a in [e^{-n}, 1].
inline JohnFunction john_function(const LogConcaveFn& f, int grid_size = 64) {
    const int n = f.dim();
    require(grid_size >= 3, "john_function: grid needs at least three points");
    if (f.is_gaussian()) {
        const auto& g = f.gaussian_form();
        const auto roots = spd_sqrt(g.precision);
        return detail::make_john(f, std::exp(-0.5 * n), g.center, std::sqrt(static_cast<double>(n)) * roots.second);
    }
    if (f.is_indicator()) {
        // every level set is the same body, so a vol(MVIE) grows with a
        const detail::JohnLevel top = detail::john_level(f, 1.0);
        if (top.objective < 0.0) throw SolverError("john_function: degenerate indicator");
        return detail::make_john(f, 1.0, top.body.center, top.body.e);
    }
    const double lo = -static_cast<double>(n);
    std::vector<detail::JohnLevel> grid;
    for (int i = 0; i < grid_size; ++i) grid.push_back(detail::john_level(f, std::exp(lo * (1.0 - i / (grid_size - 1.0)))));
    // grid ascends in a, so near-ties go to the larger height
    int ib = -1;
    for (int i = 0; i < grid_size; ++i) {
        if (grid[i].objective < 0.0) continue;
        if (ib < 0 || grid[i].objective >= grid[ib].objective * (1.0 - 1e-12)) ib = i;
    }
    if (ib < 0 || grid[ib].objective < 0.0) throw SolverError("john_function: every level set is degenerate");

    detail::JohnLevel best = grid[ib];
    double x0 = grid[std::max(ib - 1, 0)].a;
    double x1 = grid[std::min(ib + 1, grid_size - 1)].a;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    detail::JohnLevel c = detail::john_level(f, x1 - phi * (x1 - x0));
    detail::JohnLevel d = detail::john_level(f, x0 + phi * (x1 - x0));
    for (int it = 0; it < 40; ++it) {
        if (c.objective > d.objective) {
            x1 = d.a;
            d = c;
            c = detail::john_level(f, x1 - phi * (x1 - x0));
        } else {
            x0 = c.a;
            c = d;
            d = detail::john_level(f, x0 + phi * (x1 - x0));
        }
    }
    for (const auto* cand : {&c, &d})
        if (cand->objective > best.objective * (1.0 + 1e-12)) best = *cand;
    return detail::make_john(f, best.a, best.body.center, best.body.e);
}

/// Smallest f(x) / (a ||f||_inf) over uniform probe points of the John ellipsoid.
inline double john_feasibility(const LogConcaveFn& f, const JohnFunction& j, int probes, const SeededStream& stream) {
    const int n = f.dim();
    auto eng = stream.engine();
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < probes; ++i) {
        Vec u = standard_normal_vector(n, eng);
        u *= std::pow(ud(eng), 1.0 / n) / u.norm();
        worst = std::min(worst, f(j.ellipsoid.center + j.e * u) / j.height);
    }
    return worst;
}

/// (||f||_1 / ||E(f)||_1)^{1/n}.
inline Estimate irat(const LogConcaveFn& f, const JohnFunction& j, const Budget& budget, const SeededStream& stream) {
    const int n = f.dim();
    const Estimate mass = lp_norm(f, 1.0, budget, stream);
    const double v = std::pow(mass.value / j.value_mass, 1.0 / n);
    return {v, mass.value > 0.0 ? v / (n * mass.value) * mass.std_error : 0.0, mass.n_samples, mass.method};
}

/// Affine image of f whose John ellipsoid is the unit ball centred at the origin.
inline LogConcaveFn to_john_position(const LogConcaveFn& f, const JohnFunction& j) {
    return affine_image(f, j.position_linear, j.position_shift);
}

// ---------------------------------------------------------------------------
// Isotropic position

struct IsotropicForm {
    LogConcaveFn g;      // alpha f(Sigma^{1/2} x + m)
    Mat linear;          // g = alpha * affine_image(f, linear, shift)
    Vec shift;
    double alpha = 1.0;
    Estimate constant;   // L_f
    MeanCov moments;     // of f
};

inline double isotropic_constant_from(double sup, double mass, const Mat& cov) {
    const int n = static_cast<int>(cov.rows());
    return std::pow(sup / mass, 1.0 / n) * std::pow(cov.determinant(), 0.5 / n);
}

inline IsotropicForm isotropize(const LogConcaveFn& f, const Budget& budget, const SeededStream& stream) {
    MeanCov mc = mean_cov(f, budget, stream);
    if (!mc.positive_definite) throw DomainError("isotropize: covariance is not positive definite");
    const auto roots = spd_sqrt(mc.cov);
    const Mat& inv_root = roots.second;
    const double alpha = std::sqrt(mc.cov.determinant()) / mc.mass.value;
    const Vec shift = -inv_root * mc.mean;
    LogConcaveFn g = scaled(affine_image(f, inv_root, shift), alpha);
    const double l = isotropic_constant_from(f.sup(), mc.mass.value, mc.cov);
    double se = 0.0;
    if (mc.groups.size() >= 2) {
        Vec ls(static_cast<Eigen::Index>(mc.groups.size()));
        for (std::size_t i = 0; i < mc.groups.size(); ++i)
            ls(static_cast<Eigen::Index>(i)) = isotropic_constant_from(f.sup(), mc.groups[i].mass, mc.groups[i].cov);
        se = mean_estimate(ls, Method::mc_box).std_error;
    }
    Estimate constant{l, se, mc.mass.n_samples, mc.mass.method};
    return {std::move(g), inv_root, shift, alpha, constant, std::move(mc)};
}

// ---------------------------------------------------------------------------
// Section power means

struct SectionPowerMean {
    Estimate raw;         // (E_H ||S_H f||^n)^{1/n}
    Estimate phi_tilde;   // (omega_n / omega_k) raw
};

inline SectionPowerMean section_power_mean(const LogConcaveFn& f, int k, const Budget& budget, const SeededStream& stream) {
    const int n = f.dim();
    require(1 <= k && k <= n - 1, "section_power_mean: need 1 <= k <= n - 1");
    require(budget.frames >= 2, "section_power_mean: need at least two frames");
    const Budget inner = detail::inner_budget(budget);
    std::vector<double> vals(budget.frames);
    parallel_for(budget.frames, budget.jobs, [&](std::size_t i) {
        const Frame h = sample_haar(n, k, stream.derive("frame").at(i));
        vals[i] = std::pow(subspace_norm(f, h, RestrictMode::section, inner, stream.derive("inner").at(i)).value, n);
    });
    const Estimate m = detail::outer_mean(vals, inner.samples);
    const double raw = std::pow(std::max(m.value, 0.0), 1.0 / n);
    const double se = m.value > 0.0 ? raw / (n * m.value) * m.std_error : 0.0;
    SectionPowerMean out;
    out.raw = {raw, se, m.n_samples, m.method};
    const double ratio = unit_ball_volume(n) / unit_ball_volume(k);
    out.phi_tilde = {ratio * raw, ratio * se, m.n_samples, m.method};
    return out;
}

// ---------------------------------------------------------------------------
// Exact constants

using Rational = boost::rational<std::int64_t>;

/// b_{n,k} = (n+k+1)...(2n) / ((k+1)...n).
inline Rational b_constant(int n, int k) {
    require(n >= 1 && n <= 30, "b_constant: need 1 <= n <= 30");
    require(0 <= k && k <= n - 1, "b_constant: need 0 <= k <= n - 1");
    Rational b(1);
    for (int i = 1; i <= n - k; ++i) b *= Rational(n + k + i, k + i);
    return b;
}

inline bool b_within_power_of_four(int n, int k) {
    require(n - k <= 30, "b_within_power_of_four: exponent too large");
    return b_constant(n, k) <= Rational(std::int64_t{1} << (2 * (n - k)));
}

struct OmegaRatio {
    double ratio = 0.0;      // omega_k^n / omega_n^k
    double bound = 0.0;      // c0^{n(n-k)}
    double log_margin = 0.0; // log bound - log ratio, evaluated in 50-digit arithmetic
    [[nodiscard]] bool holds() const { return log_margin >= 0.0; }
};

/// omega_k^n / omega_n^k = Gamma(n/2+1)^k / Gamma(k/2+1)^n against c0^{n(n-k)}.
inline OmegaRatio omega_ratio(int n, int k, double c0) {
    require(1 <= k && k < n, "omega_ratio: need 1 <= k < n");
    require(c0 > 0.0, "omega_ratio: c0 must be positive");
    using Big = boost::multiprecision::cpp_bin_float_50;
    std::ostringstream os;
    os << std::setprecision(15) << c0;
    const Big c(os.str());
    const Big log_ratio = Big(k) * boost::math::lgamma(Big(n) / 2 + 1) - Big(n) * boost::math::lgamma(Big(k) / 2 + 1);
    const Big log_bound = Big(n) * Big(n - k) * boost::multiprecision::log(c);
    OmegaRatio out;
    out.ratio = static_cast<double>(boost::multiprecision::exp(log_ratio));
    out.bound = static_cast<double>(boost::multiprecision::exp(log_bound));
    out.log_margin = static_cast<double>(log_bound - log_ratio);
    return out;
}

}  // namespace lcg
