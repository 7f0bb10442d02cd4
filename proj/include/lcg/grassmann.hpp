#pragma once

// Orthonormal frames of k-dimensional subspaces and Haar sampling on G(n,k).

#include "lcg/core.hpp"

namespace lcg {

struct Frame {
    Mat basis;       // n x k, orthonormal columns spanning H
    Mat complement;  // n x (n-k), orthonormal columns spanning H-perp

    [[nodiscard]] int n() const { return static_cast<int>(basis.rows()); }
    [[nodiscard]] int k() const { return static_cast<int>(basis.cols()); }

    [[nodiscard]] Vec embed(const Vec& y) const {
        require(y.size() == k(), "Frame::embed: dimension mismatch");
        return basis * y;
    }

    [[nodiscard]] Vec coords(const Vec& x) const {
        require(x.size() == n(), "Frame::coords: dimension mismatch");
        return basis.transpose() * x;
    }

    /// Projector onto H.
    [[nodiscard]] Mat projector() const { return basis * basis.transpose(); }

    [[nodiscard]] Frame orthocomplement() const { return {complement, basis}; }
};

/// Largest deviation from orthonormality of the combined [basis complement] matrix.
inline double frame_defect(const Frame& f) {
    Mat full(f.n(), f.n());
    full << f.basis, f.complement;
    return (full.transpose() * full - Mat::Identity(f.n(), f.n())).cwiseAbs().maxCoeff();
}

inline void require_frame(const Frame& f, int n) {
    require(f.n() == n && f.complement.rows() == n && f.k() + f.complement.cols() == n,
            "frame: dimension mismatch");
    require(frame_defect(f) <= 1e-10, "frame: columns are not orthonormal");
}

namespace detail {

// Q factor of a square matrix with the diagonal of R made positive; nullopt if rank-deficient.
inline std::optional<Mat> signed_q(const Mat& g) {
    const int n = static_cast<int>(g.rows());
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    const Mat r = qr.matrixQR().template triangularView<Eigen::Upper>();
    const double scale = r.diagonal().cwiseAbs().maxCoeff();
    for (int i = 0; i < n; ++i) {
        if (std::abs(r(i, i)) <= 1e-12 * std::max(scale, 1.0)) return std::nullopt;
        if (r(i, i) < 0.0) q.col(i) = -q.col(i);
    }
    return q;
}

}  // namespace detail

/// Completes a basis with orthonormal columns to a frame.
inline Frame make_frame(const Mat& basis) {
    const int n = static_cast<int>(basis.rows());
    const int k = static_cast<int>(basis.cols());
    require(k <= n, "make_frame: more columns than rows");
    require((basis.transpose() * basis - Mat::Identity(k, k)).cwiseAbs().maxCoeff() <= 1e-10,
            "make_frame: basis is not orthonormal");
    Eigen::HouseholderQR<Mat> qr(basis);
    const Mat q = qr.householderQ();
    return {basis, q.rightCols(n - k)};
}

/// Frame spanned by the given (not necessarily orthonormal) columns.
inline Frame span_frame(const Mat& columns) {
    const int n = static_cast<int>(columns.rows());
    const int k = static_cast<int>(columns.cols());
    Eigen::ColPivHouseholderQR<Mat> qr(columns);
    require(qr.rank() == k, "span_frame: columns are linearly dependent");
    const Mat q = qr.householderQ();
    return {q.leftCols(k), q.rightCols(n - k)};
}

/// Frame of the first k coordinate axes.
inline Frame axis_frame(int n, int k) {
    require(0 <= k && k <= n, "axis_frame: need 0 <= k <= n");
    const Mat id = Mat::Identity(n, n);
    return {id.leftCols(k), id.rightCols(n - k)};
}

/// Frame of the hyperplane orthogonal to a unit vector.
inline Frame hyperplane_frame(const Vec& theta) {
    require(std::abs(theta.norm() - 1.0) <= 1e-10, "hyperplane_frame: direction must be a unit vector");
    const Frame line = make_frame(theta);
    return line.orthocomplement();
}

inline Frame sample_haar(int n, int k, const SeededStream& stream) {
    require(1 <= k && k <= n, "sample_haar: need 1 <= k <= n");
    for (int attempt = 0; attempt < 2; ++attempt) {
        auto eng = (attempt == 0 ? stream : stream.derive("redraw")).engine();
        Mat g(n, n);
        for (int j = 0; j < n; ++j) g.col(j) = standard_normal_vector(n, eng);
        if (auto q = detail::signed_q(g)) return {q->leftCols(k), q->rightCols(n - k)};
    }
    throw SolverError("sample_haar: rank-deficient Gaussian draw");
}

inline Vec sample_sphere(int n, const SeededStream& stream) {
    require(n >= 1, "sample_sphere: need n >= 1");
    auto eng = stream.engine();
    Vec v = standard_normal_vector(n, eng);
    while (v.norm() == 0.0) v = standard_normal_vector(n, eng);
    return v / v.norm();
}

/// Orthogonal matrix drawn from the Haar measure on O(n).
inline Mat sample_rotation(int n, const SeededStream& stream) {
    const Frame f = sample_haar(n, n, stream);
    return f.basis;
}

}  // namespace lcg
