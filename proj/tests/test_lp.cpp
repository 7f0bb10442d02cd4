#include "lcg/lp.hpp"

#include <gtest/gtest.h>

using namespace lcg;

namespace {

// Brute force: best vertex among all n-subsets of tight rows (bounded feasible LPs only).
double brute_force_min(const Mat& a, const Vec& b, const Vec& c) {
    const int n = static_cast<int>(a.cols());
    const int r = static_cast<int>(a.rows());
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    while (true) {
        Mat s(n, n);
        Vec rhs(n);
        for (int i = 0; i < n; ++i) {
            s.row(i) = a.row(idx[i]);
            rhs(i) = b(idx[i]);
        }
        Eigen::FullPivLU<Mat> lu(s);
        if (lu.rank() == n) {
            Vec x = lu.solve(rhs);
            if (((a * x - b).array() <= 1e-9).all()) best = std::min(best, c.dot(x));
        }
        int i = n - 1;
        while (i >= 0 && idx[i] == r - n + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
    }
    return best;
}

}  // namespace

TEST(Lp, BoxMinimum) {
    Mat a(4, 2);
    a << 1, 0, -1, 0, 0, 1, 0, -1;
    Vec b(4);
    b << 1, 1, 2, 2;
    Vec c(2);
    c << 1, -1;
    const auto r = solve_lp(a, b, c);
    ASSERT_TRUE(r.optimal());
    EXPECT_NEAR(r.value, -3.0, 1e-12);
    EXPECT_NEAR(r.x(0), -1.0, 1e-12);
    EXPECT_NEAR(r.x(1), 2.0, 1e-12);
}

TEST(Lp, Infeasible) {
    Mat a(2, 1);
    a << 1, -1;
    Vec b(2);
    b << -1, -1;  // x <= -1 and x >= 1
    EXPECT_EQ(solve_lp(a, b, Vec::Ones(1)).status, LpStatus::infeasible);
    EXPECT_FALSE(lp_feasible(a, b));
}

TEST(Lp, Unbounded) {
    Mat a(1, 2);
    a << 1, 0;
    Vec b(1);
    b << 1;
    Vec c(2);
    c << 0, 1;
    EXPECT_EQ(solve_lp(a, b, c).status, LpStatus::unbounded);
}

TEST(Lp, EpigraphOfMaxAffine) {
    // minimize t s.t. |x| <= t, -1 <= x <= 1 ; optimum 0
    Mat a(4, 2);
    a << 1, -1, -1, -1, 1, 0, -1, 0;
    Vec b(4);
    b << 0, 0, 1, 1;
    Vec c(2);
    c << 0, 1;
    const auto r = solve_lp(a, b, c);
    ASSERT_TRUE(r.optimal());
    EXPECT_NEAR(r.value, 0.0, 1e-12);
}

TEST(Lp, DegenerateRedundantRows) {
    Mat a(6, 2);
    a << 1, 0, 1, 0, -1, 0, 0, 1, 0, -1, 1, 1;
    Vec b(6);
    b << 1, 1, 1, 1, 1, 2;
    Vec c(2);
    c << -1, -1;
    const auto r = solve_lp(a, b, c);
    ASSERT_TRUE(r.optimal());
    EXPECT_NEAR(r.value, -2.0, 1e-12);
}

TEST(Lp, RandomAgainstVertexEnumeration) {
    std::mt19937_64 eng(11);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + trial % 4;
        const int r = 2 * n + 1 + trial % 7;
        Mat a(r + 2 * n, n);
        Vec b(r + 2 * n);
        for (int i = 0; i < r; ++i) {
            for (int j = 0; j < n; ++j) a(i, j) = nd(eng);
            b(i) = std::abs(nd(eng)) + 0.1;
        }
        a.bottomRows(2 * n) << Mat::Identity(n, n), -Mat::Identity(n, n);
        b.tail(2 * n).setConstant(3.0);
        Vec c(n);
        for (int j = 0; j < n; ++j) c(j) = nd(eng);
        const auto res = solve_lp(a, b, c);
        ASSERT_TRUE(res.optimal()) << trial;
        EXPECT_NEAR(res.value, brute_force_min(a, b, c), 1e-9) << trial;
        EXPECT_LE((a * res.x - b).maxCoeff(), 1e-9) << trial;
    }
}

TEST(Lp, DimensionMismatchThrows) {
    EXPECT_THROW(solve_lp(Mat::Zero(2, 2), Vec::Zero(3), Vec::Zero(2)), DomainError);
}
