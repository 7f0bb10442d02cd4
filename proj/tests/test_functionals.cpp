#include "lcg/functionals.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace lcg;
using namespace testsupport;

namespace {

constexpr double kPi = std::numbers::pi;

Budget budget(std::size_t samples, std::size_t frames) {
    Budget b;
    b.samples = samples;
    b.frames = frames;
    return b;
}

// Integral of |grad f| for a Gaussian by polar quadrature (n = 2) or a product rule on the sphere (n = 3).
double gradient_oracle(const LogConcaveFn& g) {
    const auto& form = g.gaussian_form();
    const int n = g.dim();
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    auto radial = [&](const Vec& theta) {
        auto h = [&](double r) {
            const Vec x = form.center + r * theta;
            return (form.precision * (x - form.center)).norm() * g(x) * std::pow(r, n - 1);
        };
        return GK::integrate(h, 0.0, 40.0, 12, 1e-12);
    };
    double total = 0.0;
    if (n == 2) {
        const int m = 256;
        for (int i = 0; i < m; ++i) {
            const double t = 2 * kPi * i / m;
            total += radial((Vec(2) << std::cos(t), std::sin(t)).finished()) * 2 * kPi / m;
        }
        return total;
    }
    // Gauss-Legendre in cos(polar) times a uniform azimuth grid
    boost::math::quadrature::gauss<double, 40> gl;
    const auto& nodes = boost::math::quadrature::gauss<double, 40>::abscissa();
    const auto& weights = boost::math::quadrature::gauss<double, 40>::weights();
    (void)gl;
    const int m = 96;
    for (std::size_t a = 0; a < nodes.size(); ++a)
        for (double sgn : {1.0, -1.0}) {
            if (nodes[a] == 0.0 && sgn < 0) continue;
            const double z = sgn * nodes[a];
            const double s = std::sqrt(1 - z * z);
            for (int i = 0; i < m; ++i) {
                const double t = 2 * kPi * i / m;
                total += weights[a] * 2 * kPi / m * radial((Vec(3) << s * std::cos(t), s * std::sin(t), z).finished());
            }
        }
    return total;
}

LogConcaveFn tent(int n) {
    // exp(-|x|_1) on [-1, 1.5]^n
    Mat slopes(1 << n, n);
    for (int s = 0; s < (1 << n); ++s)
        for (int j = 0; j < n; ++j) slopes(s, j) = (s >> j & 1) ? 1.0 : -1.0;
    Mat c(2 * n, n);
    c << Mat::Identity(n, n), -Mat::Identity(n, n);
    Vec d(2 * n);
    d << Vec::Constant(n, 1.5), Vec::Ones(n);
    return LogConcaveFn::pla(1.0, slopes, Vec::Zero(1 << n), c, d);
}

}  // namespace

TEST(Mvie, SquareAndBox) {
    Mat a(4, 2);
    a << 1, 0, -1, 0, 0, 1, 0, -1;
    const auto sq = mvie(a, Vec::Ones(4));
    EXPECT_NEAR(sq.volume(), kPi, 1e-7);
    EXPECT_LT(sq.center.norm(), 1e-7);
    const auto box = mvie(a, (Vec(4) << 3, 1, 0.5, 1.5).finished());
    EXPECT_NEAR(box.volume(), 2 * kPi, 1e-6);
    EXPECT_NEAR(box.center(0), 1.0, 1e-6);
    EXPECT_NEAR(box.center(1), -0.5, 1e-6);
}

TEST(Mvie, TriangleInellipse) {
    // the largest inscribed ellipse of a triangle is the Steiner inellipse: area pi/(3 sqrt 3) times the triangle's
    Mat v(2, 3);
    v << 0, 4, 1, 0, 0, 3;
    Mat a(3, 2);
    Vec b(3);
    for (int i = 0; i < 3; ++i) {
        const Vec p = v.col(i), q = v.col((i + 1) % 3), r = v.col((i + 2) % 3);
        Vec nrm(2);
        nrm << q(1) - p(1), p(0) - q(0);
        if (nrm.dot(r - p) > 0) nrm = -nrm;
        a.row(i) = nrm.transpose();
        b(i) = nrm.dot(p);
    }
    const auto e = mvie(a, b);
    EXPECT_NEAR(e.volume(), kPi / (3 * std::sqrt(3.0)) * 6.0, 1e-6);
    EXPECT_NEAR((e.center - v.rowwise().mean()).norm(), 0.0, 1e-6);
}

TEST(Mvie, AffineEquivariance) {
    const auto f = random_pla(3, 17);
    const auto& p = f.pla_form();
    Mat m(3, 3);
    m << 1.2, 0.3, -0.4, 0.1, 0.9, 0.2, -0.3, 0.5, 1.4;
    const Vec t = (Vec(3) << 0.3, -0.7, 1.1).finished();
    const auto e1 = mvie(p.constraints, p.bounds);
    // {M x + t : C x <= d} = {y : C M^{-1} y <= d + C M^{-1} t}
    const Mat minv = m.inverse();
    const auto e2 = mvie(p.constraints * minv, p.bounds + p.constraints * minv * t);
    EXPECT_NEAR(e2.log_volume, e1.log_volume + std::log(std::abs(m.determinant())), 1e-7);
    EXPECT_NEAR((e2.center - (m * e1.center + t)).norm(), 0.0, 1e-5);
}

TEST(Mvie, RejectsDegenerate) {
    Mat a(4, 2);
    a << 1, 0, -1, 0, 0, 1, 0, -1;
    EXPECT_THROW((void)mvie(a, (Vec(4) << 1, 1, 0, 0).finished()), DomainError);
    Mat half(1, 2);
    half << 1, 0;
    EXPECT_THROW((void)mvie(half, Vec::Ones(1)), DomainError);
}

TEST(Quermass, GaussianAndEndpoints) {
    const auto g = std_gaussian(2);
    const auto w1 = quermassintegral(g, 1, budget(4000, 16), {1, 0});
    EXPECT_NEAR(w1.value, kPi * std::sqrt(2 * kPi) / 2, 1e-10);
    EXPECT_EQ(quermassintegral(square(), 2, {}, {}).value, kPi);
    EXPECT_EQ(quermassintegral(g, 0, {}, {}).value, 2 * kPi);

    Budget forced = budget(8000, 16);
    forced.force_mc = true;
    const auto rnd = random_pla(2, 21);
    for (int j : {0, 2}) {
        const auto direct = quermassintegral(rnd, j, forced, {2, 0});
        const auto generic = quermassintegral(rnd, j, forced, {3, 0}, true);
        EXPECT_NEAR(generic.value, direct.value, 3.5 * std::hypot(generic.std_error, direct.std_error) + 1e-12) << j;
        EXPECT_EQ(generic.method, Method::mc_haar);
    }
    EXPECT_THROW((void)quermassintegral(g, 3, {}, {}), DomainError);
}

TEST(Quermass, PolygonBallCoefficients) {
    const auto disk = polygon(64);
    for (int j = 0; j <= 2; ++j)
        EXPECT_NEAR(quermassintegral(disk, j, budget(4000, 64), {4, static_cast<std::uint64_t>(j)}).value, kPi, 0.02 * kPi) << j;
}

TEST(Variation, GaussianGradientOracle) {
    Mat q2(2, 2);
    q2 << 1.5, 0.4, 0.4, 0.7;
    Mat q3(3, 3);
    q3 << 1.2, 0.2, 0.0, 0.2, 0.8, -0.1, 0.0, -0.1, 1.6;
    for (const auto& g : {std_gaussian(2), LogConcaveFn::gaussian(1.0, Vec::Zero(2), q2), std_gaussian(3),
                          LogConcaveFn::gaussian(2.0, Vec::Ones(3), q3)}) {
        const auto v = variation(g, budget(2000, 400), {5, 0});
        const double oracle = gradient_oracle(g);
        EXPECT_NEAR(v.value, oracle, std::max(0.01 * oracle, 3.5 * v.std_error)) << g.describe();
        EXPECT_LT(v.std_error, 0.01 * oracle);
    }
    EXPECT_NEAR(gradient_oracle(std_gaussian(2)), kPi * std::sqrt(2 * kPi), 1e-8);
}

TEST(Variation, DirectionalAndDisk) {
    const auto g = std_gaussian(2);
    const Vec theta = (Vec(2) << 0.6, 0.8).finished();
    EXPECT_NEAR(variation(g, {}, {}, theta).value, 2 * std::sqrt(2 * kPi), 1e-12);
    EXPECT_THROW((void)variation(g, {}, {}, Vec(Vec::Ones(2))), DomainError);
    // perimeter of the circumscribed 64-gon
    const double perimeter = 2 * 64 * std::tan(kPi / 64);
    const auto v = variation(polygon(64), budget(2000, 64), {6, 0});
    EXPECT_NEAR(v.value, perimeter, 3.5 * v.std_error + 1e-9);
    EXPECT_NEAR(v.value, 2 * kPi, 0.01 * 2 * kPi);
    // the 1-D variation of a unimodal function is twice its maximum
    const auto g1 = LogConcaveFn::gaussian(3.0, Vec::Zero(1), Mat::Identity(1, 1));
    EXPECT_NEAR(variation(g1, {}, {}).value, 6.0, 1e-12);
}

TEST(Steiner, SquareAndPolygon) {
    const auto fit = steiner_fit(square(), steiner_nodes(2), budget(4000, 16), {7, 0});
    const std::array<double, 3> sq{4, 8, kPi};
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(fit.coefficients(j), sq[j], 0.02 * sq[j]) << j;
    const auto ball = steiner_fit(polygon(64), steiner_nodes(2), budget(4000, 16), {8, 0});
    const std::array<double, 3> bc{kPi, 2 * kPi, kPi};
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(ball.coefficients(j), bc[j], 0.02 * bc[j]) << j;
}

TEST(Steiner, CubeInThreeDimensions) {
    // vol(C + dB) for C = [-1,1]^3: 8 + 24 d + 6 pi d^2 + (4 pi / 3) d^3
    const auto fit = steiner_fit(cube(3), steiner_nodes(3), budget(8000, 16), {9, 0});
    const std::array<double, 4> want{8, 24, 6 * kPi, 4 * kPi / 3};
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(fit.coefficients(j), want[j], 0.03 * want[j]) << j;
}

TEST(Steiner, GeneralFunctions) {
    for (const auto& f : {std_gaussian(2), tent(2)}) {
        const auto fit = steiner_fit(f, steiner_nodes(2), budget(640, 64), {10, 0}, true);
        const auto mass = lp_norm(f, 1.0, {}, {});
        EXPECT_NEAR(fit.coefficients(0), mass.value, std::max(3.5 * fit.coefficient_se(0), 1e-6 * mass.value)) << f.describe();
        // derivative at zero equals n W_1
        EXPECT_NEAR(fit.coefficients(1), fit.reference[1].value, 0.05 * fit.reference[1].value) << f.describe();
        ASSERT_EQ(fit.reference.size(), 3u);
        EXPECT_EQ(fit.reference[2].value, kPi * f.sup());
    }
}

TEST(Steiner, RejectsBadRadii) {
    EXPECT_THROW((void)steiner_fit(square(), {0.1, 0.2, 0.3, 0.4}, {}, {}), DomainError);
    EXPECT_THROW((void)steiner_fit(square(), {0.1, 0.2, 0.3, 0.4, 0.7}, {}, {}), DomainError);
    EXPECT_THROW((void)steiner_fit(square(), {0.2, 0.2, 0.2, 0.2, 0.2}, {}, {}), SolverError);
}

TEST(John, SquareAndPolygon) {
    const auto j = john_function(square());
    EXPECT_EQ(j.a, 1.0);
    EXPECT_NEAR(j.value_mass, kPi, 0.01 * kPi);
    EXPECT_NEAR(irat(square(), j, {}, {}).value, std::sqrt(4 / kPi), 0.01 * std::sqrt(4 / kPi));
    const auto jb = john_function(polygon(64));
    EXPECT_EQ(jb.a, 1.0);
    EXPECT_NEAR(jb.value_mass, kPi, 0.01 * kPi);
}

TEST(John, GaussianClosedForm) {
    const auto g = std_gaussian(2, 2.0);
    const auto j = john_function(g);
    EXPECT_GE(j.a, std::exp(-2.0));
    EXPECT_LE(j.a, 1.0);
    EXPECT_GE(john_feasibility(g, j, 500, {11, 0}), 1.0 - 1e-9);
    // a vol over the Gaussian level sets, brute force on a fine grid in a
    double best = 0.0;
    for (int i = 1; i < 20000; ++i) {
        const double a = i / 20000.0;
        best = std::max(best, a * 2.0 * levelset_volume(level_set(g, a * 2.0)).value);
    }
    EXPECT_NEAR(j.value_mass, best, 1e-6 * best);
}

TEST(John, GridOracleAndFeasibility) {
    for (const auto& f : {tent(2), random_pla(2, 31), random_pla(2, 32, false), tent(3)}) {
        const auto j = john_function(f);
        const int n = f.dim();
        EXPECT_GE(j.a, std::exp(-n) * (1 - 1e-12));
        EXPECT_LE(j.a, 1.0);
        EXPECT_GE(john_feasibility(f, j, 500, {12, 0}), 1.0 - 1e-9);
        // coarse independent scan in a never beats the search
        for (int i = 0; i <= 40; ++i) {
            const double a = std::exp(-n * (1 - i / 40.0));
            const auto body = level_set(f, a * f.sup());
            try {
                const auto& p = std::get<PolytopeBody>(body);
                EXPECT_LE(a * f.sup() * mvie(p.a, p.b).volume(), j.value_mass * (1 + 1e-6));
            } catch (const DomainError&) {
            }
        }
        EXPECT_LE(irat(f, j, {}, {13, 0}).value, 4 * std::sqrt(static_cast<double>(n)));
    }
}

TEST(John, AffineEquivarianceAndPosition) {
    const auto f = random_pla(2, 33);
    Mat a(2, 2);
    a << 1.4, 0.5, -0.3, 0.8;
    const auto g = affine_image(f, a, (Vec(2) << 0.2, 0.4).finished());
    const auto jf = john_function(f);
    const auto jg = john_function(g);
    EXPECT_NEAR(jg.value_mass, std::abs(a.determinant()) * jf.value_mass, 1e-5 * jg.value_mass);
    const auto pos = to_john_position(f, jf);
    const auto jp = john_function(pos);
    EXPECT_NEAR(jp.value_mass / (jp.height), kPi, 1e-4);
    EXPECT_LT(jp.ellipsoid.center.norm(), 1e-4);
    EXPECT_NEAR((jp.ellipsoid.shape - Mat::Identity(2, 2)).norm(), 0.0, 1e-4);
}

TEST(Isotropic, Examples) {
    const auto density = std_gaussian(2, 1.0 / (2 * kPi));
    const auto iso = isotropize(density, {}, {});
    EXPECT_NEAR(iso.constant.value, 1.0 / std::sqrt(2 * kPi), 1e-12);
    const auto sq = isotropize(square(), budget(100000, 16), {14, 0});
    EXPECT_NEAR(sq.constant.value, 1.0 / std::sqrt(12.0), 3.5 * sq.constant.std_error);
    EXPECT_LT(sq.constant.std_error, 0.01);
}

TEST(Isotropic, PositionAndInvariance) {
    const auto f = random_pla(2, 41, false);
    const auto iso = isotropize(f, budget(100000, 16), {15, 0});
    const auto mc = mean_cov(iso.g, budget(100000, 16), {16, 0});
    EXPECT_NEAR(mc.mass.value, 1.0, 3.5 * mc.mass.std_error + 0.02);
    for (int i = 0; i < 2; ++i) {
        EXPECT_NEAR(mc.mean(i), 0.0, 3.5 * mc.mean_se(i) + 0.02);
        for (int k = 0; k < 2; ++k) EXPECT_NEAR(mc.cov(i, k), i == k ? 1.0 : 0.0, 3.5 * mc.cov_se(i, k) + 0.02);
    }
    Mat a(2, 2);
    a << 2.0, 0.7, -0.4, 0.5;
    const auto img = isotropize(affine_image(f, a, Vec::Ones(2)), budget(100000, 16), {17, 0});
    EXPECT_NEAR(img.constant.value, iso.constant.value, 3.5 * std::hypot(img.constant.std_error, iso.constant.std_error));
}

TEST(SectionPowerMean, Examples) {
    const auto g = std_gaussian(2);
    const auto s = section_power_mean(g, 1, budget(2000, 16), {18, 0});
    EXPECT_NEAR(s.raw.value, std::sqrt(2 * kPi), 1e-10);
    EXPECT_NEAR(s.phi_tilde.value, kPi / 2 * std::sqrt(2 * kPi), 1e-10);
    const auto d = section_power_mean(polygon(64), 1, budget(2000, 64), {19, 0});
    EXPECT_NEAR(d.raw.value, 2.0, 0.01);
    const auto f = random_pla(2, 43);
    const auto rot = affine_image(f, sample_rotation(2, {20, 0}), Vec::Zero(2));
    const auto a = section_power_mean(f, 1, budget(2000, 400), {21, 0});
    const auto b = section_power_mean(rot, 1, budget(2000, 400), {22, 0});
    EXPECT_NEAR(a.raw.value, b.raw.value, 3.5 * std::hypot(a.raw.std_error, b.raw.std_error));
    EXPECT_THROW((void)section_power_mean(g, 2, {}, {}), DomainError);
}

TEST(Constants, BTable) {
    EXPECT_EQ(b_constant(2, 1), Rational(2));
    EXPECT_EQ(b_constant(2, 0), Rational(6));
    EXPECT_EQ(b_constant(3, 2), Rational(2));
    for (int n = 1; n <= 12; ++n)
        for (int k = 0; k < n; ++k) {
            // independent evaluation in long double via factorials
            long double num = 1, den = 1;
            for (int i = n + k + 1; i <= 2 * n; ++i) num *= i;
            for (int i = k + 1; i <= n; ++i) den *= i;
            const Rational b = b_constant(n, k);
            EXPECT_NEAR(static_cast<long double>(b.numerator()) / b.denominator(), num / den, 1e-9L * num / den);
            EXPECT_TRUE(b_within_power_of_four(n, k));
        }
    EXPECT_THROW((void)b_constant(3, 3), DomainError);
}

TEST(Constants, OmegaRatio) {
    const auto r = omega_ratio(2, 1, 1.7);
    EXPECT_NEAR(r.ratio, 4 / kPi, 1e-14);
    EXPECT_NEAR(r.bound, 1.7 * 1.7, 1e-13);
    for (int n = 2; n <= 12; ++n)
        for (int k = 1; k < n; ++k) {
            const auto o = omega_ratio(n, k, 1.7);
            EXPECT_NEAR(o.ratio, std::pow(unit_ball_volume(k), n) / std::pow(unit_ball_volume(n), k), 1e-10 * o.ratio);
            EXPECT_TRUE(o.holds());
        }
    EXPECT_FALSE(omega_ratio(12, 1, 1.0).holds());
}
