#pragma once

// Maximum-volume ellipsoid {c + E u : |u| <= 1} inscribed in {x : G x <= h}.
// Log-barrier Newton method over (symmetric E, c):
//   minimize  -t log det E - sum_i log(h_i - g_i.c - |E g_i|).

#include "lcg/polytope.hpp"

namespace lcg {

struct Mvie {
    Vec center;
    Mat e;  // symmetric positive definite
    double log_volume = -std::numeric_limits<double>::infinity();
    [[nodiscard]] double volume() const { return std::exp(log_volume); }
};

namespace detail {

struct MvieProblem {
    Mat g;  // rows normalized to unit length
    Vec h;
    int n;
    std::vector<Mat> basis;  // symmetric basis of E

    [[nodiscard]] int vars() const { return static_cast<int>(basis.size()) + n; }

    [[nodiscard]] Mat unpack_e(const Vec& x) const {
        Mat e = Mat::Zero(n, n);
        for (std::size_t p = 0; p < basis.size(); ++p) e += x(static_cast<Eigen::Index>(p)) * basis[p];
        return e;
    }
    [[nodiscard]] Vec unpack_c(const Vec& x) const { return x.tail(n); }

    // Barrier value; +inf outside the domain.
    [[nodiscard]] double value(const Vec& x, double t) const {
        const Mat e = unpack_e(x);
        Eigen::LLT<Mat> llt(e);
        if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
        const Vec c = unpack_c(x);
        double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
        double v = -t * logdet;
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            const double s = h(i) - g.row(i).dot(c) - (e * g.row(i).transpose()).norm();
            if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
            v -= std::log(s);
        }
        return v;
    }

    void derivatives(const Vec& x, double t, Vec& grad, Mat& hess) const {
        const int nv = vars();
        const int pe = static_cast<int>(basis.size());
        const Mat e = unpack_e(x);
        const Vec c = unpack_c(x);
        const Mat einv = e.inverse();
        grad = Vec::Zero(nv);
        hess = Mat::Zero(nv, nv);
        std::vector<Mat> ms(basis.size());
        for (int p = 0; p < pe; ++p) ms[p] = einv * basis[p];
        for (int p = 0; p < pe; ++p) {
            grad(p) = -t * ms[p].trace();
            for (int q = p; q < pe; ++q) hess(p, q) = hess(q, p) = t * (ms[p] * ms[q]).trace();
        }
        Mat d(n, nv);
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            const Vec gi = g.row(i).transpose();
            const Vec v = e * gi;
            const double nv_ = v.norm();
            const double s = h(i) - gi.dot(c) - nv_;
            for (int p = 0; p < pe; ++p) d.col(p) = basis[p] * gi;
            d.rightCols(n).setZero();
            const Vec u = v / nv_;
            Vec ds(nv);  // gradient of s
            ds.head(pe) = -(d.leftCols(pe).transpose() * u);
            ds.tail(n) = -gi;
            grad -= ds / s;
            const Mat proj = Mat::Identity(n, n) - u * u.transpose();
            hess += ds * ds.transpose() / (s * s);
            hess.topLeftCorner(pe, pe) += d.leftCols(pe).transpose() * proj * d.leftCols(pe) / (nv_ * s);
        }
    }
};

}  // namespace detail

inline Mvie mvie(const Mat& a, const Vec& b) {
    const int n = static_cast<int>(a.cols());
    detail::MvieProblem pr;
    pr.n = n;
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double norm = a.row(i).norm();
        if (norm > 1e-14) rows.push_back(i);
        else if (b(i) < 0.0) throw DomainError("mvie: polytope is empty");
    }
    pr.g.resize(static_cast<Eigen::Index>(rows.size()), n);
    pr.h.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const double norm = a.row(rows[r]).norm();
        pr.g.row(static_cast<Eigen::Index>(r)) = a.row(rows[r]) / norm;
        pr.h(static_cast<Eigen::Index>(r)) = b(rows[r]) / norm;
    }
    require(polytope_bounded(pr.g), "mvie: polytope is unbounded");
    const auto ball = chebyshev_ball(pr.g, pr.h);
    if (!ball || ball->radius <= 1e-12) throw DomainError("mvie: polytope has empty interior");
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Mat s = Mat::Zero(n, n);
            s(i, j) = s(j, i) = 1.0;
            pr.basis.push_back(s);
        }
    Vec x = Vec::Zero(pr.vars());
    for (int i = 0, p = 0; i < n; ++i)
        for (int j = i; j < n; ++j, ++p)
            if (i == j) x(p) = 0.5 * ball->radius;
    x.tail(n) = ball->center;

    const double m = static_cast<double>(pr.g.rows());
    double t = 1.0;
    Vec grad;
    Mat hess;
    for (int outer = 0; outer < 60; ++outer) {
        for (int it = 0; it < 200; ++it) {
            pr.derivatives(x, t, grad, hess);
            Eigen::LDLT<Mat> ldlt(hess);
            const Vec step = -ldlt.solve(grad);
            const double decrement = -grad.dot(step);
            if (!std::isfinite(decrement)) throw SolverError("mvie: Newton system is singular");
            if (decrement < 1e-12) break;
            const double f0 = pr.value(x, t);
            double alpha = 1.0;
            while (alpha > 1e-14 && !(pr.value(x + alpha * step, t) <= f0 - 0.25 * alpha * decrement)) alpha *= 0.5;
            if (alpha <= 1e-14) break;
            x += alpha * step;
        }
        if (m / t < 1e-9) break;
        t *= 10.0;
    }
    Mvie out;
    out.e = pr.unpack_e(x);
    out.e = 0.5 * (out.e + out.e.transpose());
    out.center = pr.unpack_c(x);
    Eigen::LLT<Mat> llt(out.e);
    if (llt.info() != Eigen::Success) throw SolverError("mvie: ellipsoid degenerated");
    out.log_volume = static_cast<double>(log_unit_ball_volume(n)) +
                     2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return out;
}

}  // namespace lcg
