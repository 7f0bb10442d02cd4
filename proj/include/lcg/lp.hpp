#pragma once

// Dense linear programming for the small problems that show up here:
// a handful of variables (n <= 5) and up to a few hundred inequality rows.
//
//   minimize  c.x   subject to  A x <= b,   x free.
//
// The solver runs a two-phase tableau simplex on the dual
//
//   minimize  b.u   subject to  A^T u = -c,  u >= 0,
//
// whose tableau has only n rows, so a pivot costs O(n * rows(A)).
// The primal optimum is read back from the simplex multipliers.

#include "lcg/core.hpp"

#include <limits>

namespace lcg {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    Vec x;
    double value = std::numeric_limits<double>::quiet_NaN();

    [[nodiscard]] bool optimal() const { return status == LpStatus::optimal; }
};

namespace detail {

class DualTableau {
public:
    DualTableau(const Mat& a, const Vec& b, const Vec& c)
        : m_(static_cast<int>(a.cols())), cols_(static_cast<int>(a.rows())), b_(b),
          t_(Mat::Zero(m_ + 1, cols_ + m_ + 1)), sign_(m_), basis_(m_), dead_(m_, false) {
        for (int i = 0; i < m_; ++i) {
            sign_(i) = (-c(i) < 0.0) ? -1.0 : 1.0;
            t_.row(i).head(cols_) = sign_(i) * a.col(i).transpose();
            t_(i, cols_ + i) = 1.0;
            t_(i, rhs()) = -c(i) * sign_(i);
            basis_[i] = cols_ + i;
        }
        scale_ = 1.0 + c.cwiseAbs().maxCoeff() + (cols_ > 0 ? a.cwiseAbs().maxCoeff() : 0.0);
    }

    LpResult solve(const Mat& a, const Vec& b, const Vec& c) {
        // Phase I: drive the artificials to zero.
        t_.row(m_).setZero();
        for (int i = 0; i < m_; ++i) {
            t_.row(m_).head(cols_) -= t_.row(i).head(cols_);
            t_(m_, rhs()) -= t_(i, rhs());
        }
        if (!iterate(cols_)) throw SolverError("lp: phase I unbounded (internal error)");
        if (-t_(m_, rhs()) > 1e-9 * scale_) {
            // Dual infeasible: the primal is either unbounded or infeasible.
            return primal_feasible(a, b) ? LpResult{LpStatus::unbounded, {}, -std::numeric_limits<double>::infinity()}
                                          : LpResult{LpStatus::infeasible, {}, std::numeric_limits<double>::quiet_NaN()};
        }
        evict_artificials();

        // Phase II: minimize b.u over structural columns.
        t_.row(m_).setZero();
        t_.row(m_).head(cols_) = b_.transpose();
        for (int i = 0; i < m_; ++i) {
            const double cb = basis_[i] < cols_ ? b_(basis_[i]) : 0.0;
            if (cb != 0.0) t_.row(m_) -= cb * t_.row(i);
        }
        if (!iterate(cols_)) return {LpStatus::infeasible, {}, std::numeric_limits<double>::quiet_NaN()};

        Vec x(m_);
        for (int i = 0; i < m_; ++i) x(i) = -sign_(i) * t_(m_, cols_ + i);
        return {LpStatus::optimal, x, c.dot(x)};
    }

private:
    [[nodiscard]] int rhs() const { return cols_ + m_; }

    bool iterate(int enter_limit) {
        const double eps = 1e-11 * scale_;
        for (int iter = 0; iter < 50000; ++iter) {
            const bool bland = iter > 60;
            int e = -1;
            double best = -eps;
            for (int j = 0; j < enter_limit; ++j) {
                const double d = t_(m_, j);
                if (d < best) {
                    e = j;
                    if (bland) break;
                    best = d;
                }
            }
            if (e < 0) return true;
            int leave = -1;
            double ratio = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m_; ++i) {
                if (dead_[i]) continue;
                const double p = t_(i, e);
                if (p > 1e-12) {
                    const double r = t_(i, rhs()) / p;
                    if (r < ratio - 1e-14 || (r <= ratio + 1e-14 && leave >= 0 && basis_[i] < basis_[leave])) {
                        ratio = r;
                        leave = i;
                    }
                }
            }
            if (leave < 0) return false;
            pivot(leave, e);
        }
        throw SolverError("lp: iteration limit reached");
    }

    void pivot(int r, int e) {
        t_.row(r) /= t_(r, e);
        for (int i = 0; i <= m_; ++i) {
            if (i == r) continue;
            const double f = t_(i, e);
            if (f != 0.0) t_.row(i) -= f * t_.row(r);
        }
        basis_[r] = e;
    }

    void evict_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < cols_) continue;
            int e = -1;
            double best = 1e-9;
            for (int j = 0; j < cols_; ++j)
                if (std::abs(t_(i, j)) > best) {
                    best = std::abs(t_(i, j));
                    e = j;
                }
            if (e >= 0)
                pivot(i, e);
            else
                dead_[i] = true;  // redundant row: A does not have full column rank
        }
    }

    static bool primal_feasible(const Mat& a, const Vec& b) {
        DualTableau probe(a, b, Vec::Zero(a.cols()));
        return probe.solve(a, b, Vec::Zero(a.cols())).status != LpStatus::infeasible;
    }

    int m_;
    int cols_;
    Vec b_;
    Mat t_;
    Vec sign_;
    std::vector<int> basis_;
    std::vector<bool> dead_;
    double scale_ = 1.0;
};

}  // namespace detail

/// minimize c.x subject to A x <= b with x unrestricted in sign.
inline LpResult solve_lp(const Mat& a, const Vec& b, const Vec& c) {
    require(a.rows() == b.size() && a.cols() == c.size(), "solve_lp: dimension mismatch");
    require(a.cols() > 0, "solve_lp: no variables");
    if (a.rows() == 0) {
        if (c.cwiseAbs().maxCoeff() == 0.0) return {LpStatus::optimal, Vec::Zero(c.size()), 0.0};
        return {LpStatus::unbounded, {}, -std::numeric_limits<double>::infinity()};
    }
    detail::DualTableau tab(a, b, c);
    return tab.solve(a, b, c);
}

/// Whether {x : A x <= b} is nonempty.
inline bool lp_feasible(const Mat& a, const Vec& b) {
    if (a.rows() == 0) return true;
    return solve_lp(a, b, Vec::Zero(a.cols())).status != LpStatus::infeasible;
}

}  // namespace lcg
