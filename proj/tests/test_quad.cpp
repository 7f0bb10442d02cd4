#include "lcg/quad.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace lcg;
using namespace testsupport;

namespace {

Budget mc(std::size_t samples) {
    Budget b;
    b.samples = samples;
    b.force_mc = true;
    return b;
}

}  // namespace

TEST(Quad, GaussianClosedForms) {
    const auto g = std_gaussian(2);
    const auto one = lp_norm(g, 1.0, {}, {});
    EXPECT_NEAR(one.value, 2 * std::numbers::pi, 1e-12);
    EXPECT_EQ(one.std_error, 0.0);
    EXPECT_EQ(one.method, Method::closed_form);
    EXPECT_NEAR(lp_norm(g, 2.0, {}, {}).value, std::sqrt(std::numbers::pi), 1e-12);
    EXPECT_EQ(lp_norm(g, std::numeric_limits<double>::infinity(), {}, {}).value, 1.0);
}

TEST(Quad, SquareVolume) {
    const auto exact = lp_norm(square(), 1.0, {}, {});
    EXPECT_EQ(exact.value, 4.0);
    EXPECT_EQ(exact.method, Method::exact_polytope);
    const auto est = lp_norm(square(), 1.0, mc(100000), {1, 0});
    EXPECT_EQ(est.value, 4.0);  // the bounding box is the square itself
    EXPECT_EQ(est.method, Method::mc_box);
}

TEST(Quad, InvalidArguments) {
    EXPECT_THROW(lp_norm(square(), 0.5, {}, {}), DomainError);
    EXPECT_THROW(lp_norm(square(), 1.0, mc(0), {}), DomainError);
}

TEST(Quad, ClosedFormAndMonteCarloAgree) {
    Mat q(2, 2);
    q << 2.0, 0.6, 0.6, 0.5;
    const auto g = LogConcaveFn::gaussian(1.5, (Vec(2) << 0.3, -0.2).finished(), q);
    for (const auto& f : {std_gaussian(2), g, std_gaussian(3, 2.0)}) {
        const int n = f.dim();
        for (double p : {1.0, 2.0, n / (n - 1.0)}) {
            const auto exact = lp_norm(f, p, {}, {});
            const auto est = lp_norm(f, p, mc(60000), {static_cast<std::uint64_t>(10 * p), 3});
            EXPECT_NEAR(est.value, exact.value, 3.5 * est.std_error) << n << " " << p;
            EXPECT_LT(est.std_error, 0.02 * exact.value);
        }
    }
}

TEST(Quad, SubspaceNormExamples) {
    const auto g = std_gaussian(2);
    for (int i = 0; i < 5; ++i) {
        const Frame h = sample_haar(2, 1, {4, static_cast<std::uint64_t>(i)});
        for (auto mode : {RestrictMode::projection, RestrictMode::section})
            EXPECT_NEAR(subspace_norm(g, h, mode, {}, {}).value, std::sqrt(2 * std::numbers::pi), 1e-12);
    }
    EXPECT_NEAR(subspace_norm(square(), axis_frame(2, 1), RestrictMode::projection, {}, {}).value, 2.0, 1e-12);
    const Frame full = sample_haar(2, 2, {5, 0});
    EXPECT_NEAR(subspace_norm(square(), full, RestrictMode::section, {}, {}).value, 4.0, 1e-12);
}

TEST(Quad, SubspaceNormPathsAgree) {
    Mat q(3, 3);
    q << 2.0, 0.3, 0.1, 0.3, 1.0, -0.2, 0.1, -0.2, 0.7;
    const auto g = LogConcaveFn::gaussian(1.0, (Vec(3) << 0.2, 0.1, -0.3).finished(), q);
    for (const auto& f : {g, cube(3), polygon(9)}) {
        const int n = f.dim();
        for (int k = 1; k < n; ++k)
            for (auto mode : {RestrictMode::projection, RestrictMode::section}) {
                const Frame h = sample_haar(n, k, {6, static_cast<std::uint64_t>(k)});
                const auto exact = subspace_norm(f, h, mode, {}, {});
                const auto est = subspace_norm(f, h, mode, mc(40000), {7, static_cast<std::uint64_t>(k)});
                EXPECT_NE(exact.method, est.method);
                EXPECT_NEAR(est.value, exact.value, 3.5 * est.std_error + 1e-12) << n << k << to_string(mode);
            }
    }
}

TEST(Quad, LayerCakeOracle) {
    // ||f||_1 = int_0^sup vol(A_t(f)) dt, 51-point trapezoid in t
    for (const auto& f : {square(), polygon(16), std_gaussian(2)}) {
        const double top = f.sup();
        const int m = 51;
        double sum = 0.0;
        for (int i = 0; i < m; ++i) {
            double t = top * i / (m - 1);
            double vol;
            if (i == 0) {
                t = top * 1e-12;
            }
            if (f.is_gaussian() && i == m - 1)
                vol = 0.0;
            else
                vol = levelset_volume(level_set(f, t)).value;
            sum += (i == 0 || i == m - 1 ? 0.5 : 1.0) * vol;
        }
        double trap = sum * top / (m - 1);
        if (f.is_gaussian()) {
            // the Gaussian level volume diverges logarithmically at t -> 0; use the exact near-zero slab
            const double t1 = top / (m - 1);
            const double first = 0.5 * (levelset_volume(level_set(f, top * 1e-12)).value + levelset_volume(level_set(f, t1)).value) * t1;
            const double exact_first = 2 * std::numbers::pi * t1 * (1.0 - std::log(t1));  // int_0^t1 2 pi log(1/t) dt
            trap += exact_first - first;
        }
        EXPECT_NEAR(trap, lp_norm(f, 1.0, {}, {}).value, 0.01 * lp_norm(f, 1.0, {}, {}).value);
    }
}

TEST(Quad, HolderInterpolation) {
    for (const auto& f : {square(), std_gaussian(2), random_pla(2, 3), random_pla(2, 4, false)}) {
        const auto one = lp_norm(f, 1.0, mc(20000), {1, 1});
        for (double p : {1.5, 2.0, 3.0}) {
            const auto lp = lp_norm(f, p, mc(20000), {1, 1});
            const double bound = std::pow(f.sup(), (p - 1) / p) * std::pow(one.value, 1 / p);
            const double sigma = std::hypot(lp.std_error, bound / p * one.std_error / one.value);
            EXPECT_LE(lp.value, bound + 3 * sigma);
        }
    }
}

TEST(Quad, MeanCovExamples) {
    const auto g = LogConcaveFn::gaussian(1.0, (Vec(2) << 1, 2).finished(), Mat::Identity(2, 2));
    const auto mg = mean_cov(g, {}, {});
    EXPECT_NEAR(mg.mass.value, 2 * std::numbers::pi, 1e-12);
    EXPECT_NEAR(mg.mean(1), 2.0, 1e-15);
    EXPECT_NEAR(mg.cov(0, 0), 1.0, 1e-15);

    const auto ms = mean_cov(square(), mc(100000), {3, 0});
    for (int i = 0; i < 2; ++i) {
        EXPECT_NEAR(ms.mean(i), 0.0, 3.5 * ms.mean_se(i));
        EXPECT_NEAR(ms.cov(i, i), 1.0 / 3.0, 3.5 * ms.cov_se(i, i));
    }
    EXPECT_NEAR(ms.cov(0, 1), 0.0, 3.5 * ms.cov_se(0, 1));
    EXPECT_TRUE(ms.positive_definite);
}

TEST(Quad, MeanCovTransformationLaw) {
    const auto f = random_pla(2, 8);
    Mat a(2, 2);
    a << 1.3, 0.4, -0.2, 0.8;
    const Vec t = (Vec(2) << 0.5, -1.0).finished();
    const auto g = affine_image(f, a, t);
    const auto mf = mean_cov(f, mc(100000), {5, 0});
    const auto mgc = mean_cov(g, mc(100000), {6, 0});
    const Vec pred_mean = a * mf.mean + t;
    const Mat pred_cov = a * mf.cov * a.transpose();
    for (int i = 0; i < 2; ++i) {
        const double se = std::hypot(mgc.mean_se(i), (a.row(i).cwiseAbs() * mf.mean_se)(0));
        EXPECT_NEAR(mgc.mean(i), pred_mean(i), 3.5 * se);
        for (int j = 0; j < 2; ++j) {
            const double sep = (a.cwiseAbs() * mf.cov_se * a.cwiseAbs().transpose())(i, j);
            EXPECT_NEAR(mgc.cov(i, j), pred_cov(i, j), 3.5 * std::hypot(mgc.cov_se(i, j), sep));
        }
    }
    EXPECT_NEAR(mgc.mass.value, std::abs(a.determinant()) * mf.mass.value,
                3.5 * std::hypot(mgc.mass.std_error, std::abs(a.determinant()) * mf.mass.std_error));
}

TEST(Quad, LevelsetVolumes) {
    EXPECT_NEAR(levelset_volume(EllipsoidBody{Vec::Zero(2), Mat::Identity(2, 2)}).value, std::numbers::pi, 1e-14);
    EXPECT_NEAR(levelset_volume(EllipsoidBody{Vec::Zero(2), (Mat(2, 2) << 0.25, 0, 0, 1).finished()}).value,
                2 * std::numbers::pi, 1e-14);
    const auto sq = level_set(square(), 0.5);
    const auto v = levelset_volume(sq);
    EXPECT_EQ(v.value, 4.0);
    EXPECT_EQ(v.method, Method::exact_polytope);
    Mat half(1, 2);
    half << 1, 0;
    EXPECT_THROW(levelset_volume(PolytopeBody{half, Vec::Ones(1)}), DomainError);
}

TEST(Quad, DeterministicAcrossJobs) {
    const auto f = random_pla(3, 9, false);
    Budget one = mc(5000);
    Budget four = one;
    four.jobs = 4;
    const auto a = lp_norm(f, 1.5, one, {42, 1});
    const auto b = lp_norm(f, 1.5, four, {42, 1});
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.std_error, b.std_error);
}
