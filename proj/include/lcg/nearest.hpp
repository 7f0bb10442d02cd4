#pragma once

// Euclidean projection onto a polyhedron {y : G y <= h}.
//
// Dual active-set method (Goldfarb-Idnani specialised to an identity Hessian):
// start from the unconstrained minimizer y = x and repeatedly add the most
// violated constraint, dropping active constraints whose multiplier would turn
// negative. The active set stays linearly independent, so it never holds more
// than dim(y) constraints.

#include "lcg/core.hpp"

#include <limits>

namespace lcg {

struct NearestPoint {
    bool feasible = false;
    Vec point;
    double distance = std::numeric_limits<double>::infinity();
};

inline NearestPoint nearest_point(const Mat& g, const Vec& h, const Vec& x) {
    require(g.cols() == x.size() && g.rows() == h.size(), "nearest_point: dimension mismatch");
    const int n = static_cast<int>(x.size());
    Vec y = x;
    if (g.rows() == 0) return {true, y, 0.0};

    const Vec norms = g.rowwise().norm();
    const double scale = 1.0 + h.cwiseAbs().maxCoeff() + x.cwiseAbs().maxCoeff();
    const double tol = 1e-12 * scale;

    std::vector<int> active;
    std::vector<double> mult;
    Mat basis(n, 0);

    const int max_iter = 20 * static_cast<int>(g.rows() + n) + 100;
    for (int iter = 0; iter < max_iter; ++iter) {
        int p = -1;
        double worst = tol;
        for (int j = 0; j < g.rows(); ++j) {
            if (norms(j) == 0.0) {
                if (h(j) < -tol) return {false, {}, std::numeric_limits<double>::infinity()};
                continue;
            }
            const double v = (g.row(j).dot(y) - h(j)) / norms(j);
            if (v > worst) {
                worst = v;
                p = j;
            }
        }
        if (p < 0) return {true, y, (y - x).norm()};

        const Vec gp = g.row(p).transpose();
        double up = 0.0;
        for (int inner = 0; inner <= n + 1; ++inner) {
            Vec r;
            Vec z = gp;
            if (!active.empty()) {
                r = basis.colPivHouseholderQr().solve(gp);
                z = gp - basis * r;
            }
            const double viol = gp.dot(y) - h(p);
            const double zz = z.squaredNorm();
            const double full = zz > 1e-24 * gp.squaredNorm() ? viol / zz : std::numeric_limits<double>::infinity();
            double partial = std::numeric_limits<double>::infinity();
            int drop = -1;
            for (std::size_t j = 0; j < active.size(); ++j)
                if (r(static_cast<int>(j)) > 1e-14) {
                    const double s = mult[j] / r(static_cast<int>(j));
                    if (s < partial) {
                        partial = s;
                        drop = static_cast<int>(j);
                    }
                }
            if (!std::isfinite(full) && drop < 0) return {false, {}, std::numeric_limits<double>::infinity()};

            const double step = std::min(full, partial);
            if (std::isfinite(full)) y -= step * z;
            for (std::size_t j = 0; j < active.size(); ++j) mult[j] -= step * r(static_cast<int>(j));
            up += step;

            if (full <= partial) {
                active.push_back(p);
                mult.push_back(up);
                basis.conservativeResize(n, basis.cols() + 1);
                basis.col(basis.cols() - 1) = gp;
                break;
            }
            active.erase(active.begin() + drop);
            mult.erase(mult.begin() + drop);
            Mat nb(n, basis.cols() - 1);
            for (int c = 0, k = 0; c < basis.cols(); ++c)
                if (c != drop) nb.col(k++) = basis.col(c);
            basis = nb;
        }
    }
    throw SolverError("nearest_point: iteration limit reached");
}

}  // namespace lcg
