#pragma once

// H-polytopes {x : A x <= b} in low dimension: feasibility, boundedness,
// Chebyshev centre, bounding boxes, vertex enumeration and exact volumes.
// Vertex enumeration is brute force over n-subsets of rows, which is fine for
// the desk-scale dimensions (n <= 4) this library targets.

#include "lcg/lp.hpp"

#include <optional>
#include <set>

namespace lcg {

struct Ball {
    Vec center;
    double radius = 0.0;
};

/// Largest ball inside {A x <= b}; nullopt when the polytope is empty or unbounded in a way the LP cannot bound.
inline std::optional<Ball> chebyshev_ball(const Mat& a, const Vec& b) {
    const int n = static_cast<int>(a.cols());
    Mat lhs(a.rows() + 1, n + 1);
    Vec rhs(a.rows() + 1);
    lhs.topLeftCorner(a.rows(), n) = a;
    lhs.col(n).head(a.rows()) = a.rowwise().norm();
    rhs.head(a.rows()) = b;
    // cap the radius so unbounded polytopes still yield a finite answer
    lhs.row(a.rows()).setZero();
    lhs(a.rows(), n) = 1.0;
    rhs(a.rows()) = 1e6;
    Vec c = Vec::Zero(n + 1);
    c(n) = -1.0;
    const LpResult r = solve_lp(lhs, rhs, c);
    if (!r.optimal() || r.x(n) < 0.0) return std::nullopt;
    return Ball{r.x.head(n), r.x(n)};
}

/// True when the cone {u : K u <= 0} is {0}.
inline bool cone_is_trivial(const Mat& k) {
    const int n = static_cast<int>(k.cols());
    Mat lhs(k.rows() + 2 * n, n);
    Vec rhs(k.rows() + 2 * n);
    lhs.topRows(k.rows()) = k;
    rhs.head(k.rows()).setZero();
    lhs.bottomRows(2 * n) << Mat::Identity(n, n), -Mat::Identity(n, n);
    rhs.tail(2 * n).setOnes();
    for (int j = 0; j < n; ++j)
        for (double sgn : {1.0, -1.0}) {
            Vec c = Vec::Zero(n);
            c(j) = -sgn;
            const LpResult r = solve_lp(lhs, rhs, c);
            if (!r.optimal()) throw SolverError("cone_is_trivial: LP failed");
            if (-r.value > 1e-9) return false;
        }
    return true;
}

inline bool polytope_bounded(const Mat& a) { return a.rows() > 0 && cone_is_trivial(a); }

/// max u.x over the polytope; nullopt when unbounded or empty.
inline std::optional<double> support_value(const Mat& a, const Vec& b, const Vec& u) {
    const LpResult r = solve_lp(a, b, -u);
    if (!r.optimal()) return std::nullopt;
    return -r.value;
}

struct Box {
    Vec lo;
    Vec hi;
    [[nodiscard]] double volume() const { return (hi - lo).prod(); }
};

/// Axis-aligned bounding box of a bounded polytope, optionally in rotated coordinates y = basis^T x.
inline Box bounding_box(const Mat& a, const Vec& b, const Mat& basis) {
    const int k = static_cast<int>(basis.cols());
    Box box{Vec(k), Vec(k)};
    for (int j = 0; j < k; ++j) {
        const auto hi = support_value(a, b, basis.col(j));
        const auto lo = support_value(a, b, -basis.col(j));
        if (!hi || !lo) throw DomainError("bounding_box: polytope is empty or unbounded");
        box.hi(j) = *hi;
        box.lo(j) = -*lo;
    }
    return box;
}

inline Box bounding_box(const Mat& a, const Vec& b) {
    return bounding_box(a, b, Mat::Identity(a.cols(), a.cols()));
}

struct Vertex {
    Vec x;
    std::vector<int> tight;  // sorted indices of rows active at x
};

inline std::vector<Vertex> enumerate_vertices(const Mat& a, const Vec& b) {
    const int n = static_cast<int>(a.cols());
    const int r = static_cast<int>(a.rows());
    std::vector<Vertex> out;
    if (r < n) return out;
    const double scale = 1.0 + b.cwiseAbs().maxCoeff();
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    Mat sub(n, n);
    Vec rhs(n);
    while (true) {
        for (int i = 0; i < n; ++i) {
            sub.row(i) = a.row(idx[i]);
            rhs(i) = b(idx[i]);
        }
        Eigen::FullPivLU<Mat> lu(sub);
        lu.setThreshold(1e-10);
        if (lu.rank() == n) {
            const Vec x = lu.solve(rhs);
            if (((a * x - b).array() <= 1e-9 * scale).all()) {
                bool dup = false;
                for (const auto& v : out)
                    if ((v.x - x).cwiseAbs().maxCoeff() <= 1e-9 * scale) {
                        dup = true;
                        break;
                    }
                if (!dup) out.push_back({x, {}});
            }
        }
        int i = n - 1;
        while (i >= 0 && idx[i] == r - n + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
    }
    for (auto& v : out) {
        const Vec res = a * v.x - b;
        for (int j = 0; j < r; ++j) {
            const double s = 1e-9 * (1.0 + std::abs(b(j)) + a.row(j).cwiseAbs().sum() * v.x.cwiseAbs().maxCoeff());
            if (std::abs(res(j)) <= s) v.tight.push_back(j);
        }
    }
    return out;
}

namespace detail {

inline double hull_volume_rec(const std::vector<Vec>& pts, const std::vector<std::vector<int>>& tags, int d) {
    if (pts.empty()) return 0.0;
    if (d == 0) return 1.0;
    if (d == 1) {
        double lo = pts[0](0), hi = pts[0](0);
        for (const auto& p : pts) {
            lo = std::min(lo, p(0));
            hi = std::max(hi, p(0));
        }
        return hi - lo;
    }
    Vec c = Vec::Zero(d);
    for (const auto& p : pts) c += p;
    c /= static_cast<double>(pts.size());

    std::vector<int> cand;
    for (const auto& t : tags) cand.insert(cand.end(), t.begin(), t.end());
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    std::set<std::vector<int>> seen;
    double vol = 0.0;
    for (int j : cand) {
        std::vector<int> idx;
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (std::binary_search(tags[i].begin(), tags[i].end(), j)) idx.push_back(static_cast<int>(i));
        if (static_cast<int>(idx.size()) < d) continue;
        if (!seen.insert(idx).second) continue;
        const Vec& p0 = pts[idx[0]];
        Mat diff(d, idx.size() - 1);
        for (std::size_t i = 1; i < idx.size(); ++i) diff.col(i - 1) = pts[idx[i]] - p0;
        Eigen::ColPivHouseholderQR<Mat> qr(diff);
        qr.setThreshold(1e-9);
        if (qr.rank() != d - 1) continue;
        const Mat q = qr.householderQ();
        const Mat u = q.leftCols(d - 1);
        const double height = std::abs(q.col(d - 1).dot(c - p0));
        std::vector<Vec> local;
        std::vector<std::vector<int>> sub;
        local.reserve(idx.size());
        for (int i : idx) {
            local.push_back(u.transpose() * (pts[i] - p0));
            sub.push_back(tags[i]);
        }
        vol += height * hull_volume_rec(local, sub, d - 1) / d;
    }
    return vol;
}

}  // namespace detail

/// Exact volume of a bounded polytope {A x <= b} by recursive facet decomposition.
inline double polytope_volume(const Mat& a, const Vec& b) {
    const int n = static_cast<int>(a.cols());
    const auto verts = enumerate_vertices(a, b);
    if (static_cast<int>(verts.size()) <= n) return 0.0;
    std::vector<Vec> pts;
    std::vector<std::vector<int>> tags;
    for (const auto& v : verts) {
        pts.push_back(v.x);
        tags.push_back(v.tight);
    }
    Mat diff(n, pts.size() - 1);
    for (std::size_t i = 1; i < pts.size(); ++i) diff.col(i - 1) = pts[i] - pts[0];
    Eigen::ColPivHouseholderQR<Mat> qr(diff);
    qr.setThreshold(1e-9);
    if (qr.rank() < n) return 0.0;
    return detail::hull_volume_rec(pts, tags, n);
}

/// Volume of the convex hull of points in dimension 1 or 2.
inline double hull_volume_low_dim(const std::vector<Vec>& pts) {
    if (pts.empty()) return 0.0;
    const int d = static_cast<int>(pts[0].size());
    if (d == 0) return 1.0;
    if (d == 1) {
        double lo = pts[0](0), hi = pts[0](0);
        for (const auto& p : pts) {
            lo = std::min(lo, p(0));
            hi = std::max(hi, p(0));
        }
        return hi - lo;
    }
    require(d == 2, "hull_volume_low_dim: dimension must be <= 2");
    std::vector<std::pair<double, double>> p;
    p.reserve(pts.size());
    for (const auto& v : pts) p.emplace_back(v(0), v(1));
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    if (p.size() < 3) return 0.0;
    auto cross = [](auto o, auto a, auto b) {
        return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
    };
    std::vector<std::pair<double, double>> hull(2 * p.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p[i]) <= 0) --k;
        hull[k++] = p[i];
    }
    for (std::size_t i = p.size() - 1, t = k + 1; i > 0; --i) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], p[i - 1]) <= 0) --k;
        hull[k++] = p[i - 1];
    }
    hull.resize(k - 1);
    double area = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const auto& u = hull[i];
        const auto& v = hull[(i + 1) % hull.size()];
        area += u.first * v.second - v.first * u.second;
    }
    return 0.5 * std::abs(area);
}

}  // namespace lcg
