#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace lcg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (dimension mismatch, bad parameter, invalid input data).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A numerical subproblem (LP, root finding, ellipsoid search) did not produce a usable answer.
class SolverError : public Error {
public:
    using Error::Error;
};

/// A check was asked to run on inputs whose hypothesis could not be verified.
class HypothesisError : public Error {
public:
    using Error::Error;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw DomainError(what);
}

/// Volume of the unit Euclidean ball in R^n, pi^{n/2} / Gamma(n/2 + 1).
inline double unit_ball_volume(int n) {
    if (n < 0) throw DomainError("unit_ball_volume: negative dimension");
    return std::exp(0.5 * n * std::log(std::numbers::pi) - std::lgamma(0.5 * n + 1.0));
}

inline long double log_unit_ball_volume(int n) {
    return 0.5L * n * std::log(std::numbers::pi_v<long double>) - std::lgamma(0.5L * n + 1.0L);
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace detail

/// Counter-based random stream: (seed, index) fully determines the draws.
/// Child streams are derived by counter or by name, never by advancing shared state.
struct SeededStream {
    std::uint64_t seed = 0;
    std::uint64_t index = 0;

    [[nodiscard]] SeededStream at(std::uint64_t i) const {
        return {seed, detail::splitmix64(index ^ detail::splitmix64(i + 0x632be59bd9b4e019ULL))};
    }

    [[nodiscard]] SeededStream derive(std::string_view tag) const { return at(detail::fnv1a(tag)); }

    [[nodiscard]] std::mt19937_64 engine() const {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
        return std::mt19937_64(seq);
    }
};

inline Vec standard_normal_vector(int n, std::mt19937_64& eng) {
    std::normal_distribution<double> nd;
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = nd(eng);
    return v;
}

/// Runs body(i) for i in [0, count) on up to `jobs` threads. Each index is
/// processed exactly once; callers store results per index so the outcome
/// never depends on the worker count.
template <class Body>
void parallel_for(std::size_t count, unsigned jobs, Body&& body) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(jobs, count);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Symmetric positive-definite square root and inverse square root.
inline std::pair<Mat, Mat> spd_sqrt(const Mat& s) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (s + s.transpose()));
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
        throw DomainError("matrix is not positive definite");
    const Vec r = es.eigenvalues().cwiseSqrt();
    const Mat& v = es.eigenvectors();
    return {v * r.asDiagonal() * v.transpose(), v * r.cwiseInverse().asDiagonal() * v.transpose()};
}

}  // namespace lcg
