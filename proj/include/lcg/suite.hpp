#pragma once

// Built-in test functions and hypothesis-satisfying pairs for n = 2, 3.

#include "lcg/funcrep.hpp"

#include <map>

namespace lcg {

struct NamedFn {
    std::string label;
    std::shared_ptr<const LogConcaveFn> fn;

    [[nodiscard]] const LogConcaveFn& operator*() const { return *fn; }
    [[nodiscard]] const LogConcaveFn* operator->() const { return fn.get(); }
};

inline NamedFn named(std::string label, LogConcaveFn f) {
    return {std::move(label), std::make_shared<const LogConcaveFn>(std::move(f))};
}

namespace builtin {

inline Mat box_rows(int n) {
    Mat c(2 * n, n);
    c << Mat::Identity(n, n), -Mat::Identity(n, n);
    return c;
}

inline LogConcaveFn gaussian(int n) { return LogConcaveFn::gaussian(1.0, Vec::Zero(n), Mat::Identity(n, n)); }

inline LogConcaveFn gaussian_aniso(int n) {
    Mat q = Mat::Identity(n, n);
    for (int i = 0; i < n; ++i) q(i, i) = 0.5 + 0.75 * i;
    q(0, 1) = q(1, 0) = 0.3;
    Vec m = Vec::LinSpaced(n, 0.4, -0.3);
    return LogConcaveFn::gaussian(1.5, m, q);
}

inline LogConcaveFn gaussian_density(int n) {
    return LogConcaveFn::gaussian(std::pow(2.0 * std::numbers::pi, -0.5 * n), Vec::Zero(n), Mat::Identity(n, n));
}

inline LogConcaveFn cube(int n) { return LogConcaveFn::indicator(box_rows(n), Vec::Ones(2 * n)); }

inline LogConcaveFn box(int n) {
    Vec d(2 * n);
    for (int i = 0; i < n; ++i) {
        d(i) = 2.0 - 0.6 * i;
        d(n + i) = 0.5 + 0.3 * i;
    }
    return LogConcaveFn::indicator(box_rows(n), d);
}

inline LogConcaveFn simplex(int n) {
    // edge length 2 along the axes from the vertex -2/(n+1) (1,...,1); barycentre at the origin
    Mat c(n + 1, n);
    c << -Mat::Identity(n, n), Vec::Ones(n).transpose();
    Vec d(n + 1);
    d << Vec::Constant(n, 2.0 / (n + 1)), 2.0 / (n + 1);
    return LogConcaveFn::indicator(c, d, 2.0);
}

/// Polytope approximation of the unit ball: a 64-gon, or the 26 directions of {-1,0,1}^3.
inline LogConcaveFn ball(int n) {
    std::vector<Vec> normals;
    if (n == 2) {
        for (int i = 0; i < 64; ++i) {
            const double t = 2.0 * std::numbers::pi * i / 64.0;
            normals.push_back((Vec(2) << std::cos(t), std::sin(t)).finished());
        }
    } else {
        require(n == 3, "builtin ball: n must be 2 or 3");
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b)
                for (int c = -1; c <= 1; ++c)
                    if (a || b || c) normals.push_back((Vec(3) << a, b, c).finished().normalized());
    }
    Mat rows(static_cast<Eigen::Index>(normals.size()), n);
    for (std::size_t i = 0; i < normals.size(); ++i) rows.row(static_cast<Eigen::Index>(i)) = normals[i].transpose();
    return LogConcaveFn::indicator(rows, Vec::Ones(rows.rows()));
}

inline LogConcaveFn l1_exp(int n) {
    Mat slopes(1 << n, n);
    for (int s = 0; s < (1 << n); ++s)
        for (int j = 0; j < n; ++j) slopes(s, j) = (s >> j & 1) ? 1.0 : -1.0;
    return LogConcaveFn::pla(1.0, slopes, Vec::Zero(1 << n), Mat(0, n), Vec(0));
}

inline LogConcaveFn linf_exp(int n) { return LogConcaveFn::pla(1.0, box_rows(n), Vec::Zero(2 * n), Mat(0, n), Vec(0)); }

inline LogConcaveFn tent(int n) {
    return LogConcaveFn::pla(2.0, 1.5 * box_rows(n), Vec::Zero(2 * n), box_rows(n), Vec::Ones(2 * n));
}

inline LogConcaveFn orthant_exp(int n) {
    return LogConcaveFn::pla(1.0, Vec::Ones(n).transpose(), Vec::Zero(1), -Mat::Identity(n, n), Vec::Zero(n));
}

inline LogConcaveFn sheared_cube(int n) {
    Mat a = Mat::Identity(n, n);
    a(0, 1) = 0.8;
    a(n - 1, 0) = -0.3;
    a(0, 0) = 1.5;
    return affine_image(cube(n), a, Vec::LinSpaced(n, 0.3, -0.2));
}

inline LogConcaveFn random_pla(int n) {
    std::mt19937_64 eng(0x5eedULL + static_cast<unsigned>(n));
    std::normal_distribution<double> nd;
    Mat slopes(3, n);
    Vec offsets(3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < n; ++j) slopes(i, j) = 0.7 * nd(eng);
        offsets(i) = 0.3 * nd(eng);
    }
    Mat c(2 * n + 1, n);
    c << box_rows(n), Vec::Ones(n).transpose();
    Vec d(2 * n + 1);
    d << Vec::Constant(2 * n, 1.3), 1.0;
    return LogConcaveFn::pla(1.0, slopes, offsets, c, d);
}

using Factory = LogConcaveFn (*)(int);

inline const std::vector<std::pair<std::string, Factory>>& factories() {
    static const std::vector<std::pair<std::string, Factory>> list{
        {"gaussian", gaussian},   {"gaussian_aniso", gaussian_aniso}, {"gaussian_density", gaussian_density},
        {"cube", cube},           {"box", box},                       {"simplex", simplex},
        {"ball", ball},           {"l1_exp", l1_exp},                 {"linf_exp", linf_exp},
        {"tent", tent},           {"orthant_exp", orthant_exp},       {"sheared_cube", sheared_cube},
        {"random_pla", random_pla}};
    return list;
}

}  // namespace builtin

/// Built-in function by name and dimension, e.g. ("ball", 2); label "ball2".
inline NamedFn builtin_function(const std::string& name, int n) {
    require(n == 2 || n == 3, "builtin function: dimension must be 2 or 3");
    for (const auto& [key, make] : builtin::factories())
        if (key == name) return named(name + std::to_string(n), make(n));
    throw DomainError("unknown builtin function '" + name + "'");
}

inline std::vector<NamedFn> builtin_suite(int n) {
    std::vector<NamedFn> out;
    for (const auto& entry : builtin::factories()) out.push_back(builtin_function(entry.first, n));
    return out;
}

}  // namespace lcg
