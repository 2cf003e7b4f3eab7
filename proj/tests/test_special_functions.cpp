#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "ftk/errors.hpp"
#include "ftk/special_functions.hpp"
#include "oracles.hpp"

namespace {

using ftk::bessel_j;
using ftk::gauss_jacobi_rule;
using ftk::RadialJacobiBasis;
constexpr double kPi = std::numbers::pi;

TEST(Bessel, ValuesAtZero) {
  EXPECT_EQ(bessel_j(0, 0.0), 1.0);
  EXPECT_EQ(bessel_j(3, 0.0), 0.0);
  EXPECT_EQ(bessel_j(-7, 0.0), 0.0);
}

TEST(Bessel, NegativeOrderParity) {
  for (double x : {0.3, 1.7, 12.0, 99.5, 1000.25}) {
    for (int l = 1; l < 12; ++l) {
      const double sign = (l % 2 == 0) ? 1.0 : -1.0;
      EXPECT_EQ(bessel_j(-l, x), sign * bessel_j(l, x));
    }
  }
}

TEST(Bessel, FirstZeroOfJ0) { EXPECT_NEAR(bessel_j(0, 2.404825557695773), 0.0, 1e-12); }

TEST(Bessel, FrozenHighPrecisionValues) {
  struct Case {
    int order;
    double x;
    double value;
  };
  // 40-digit reference values.
  const Case cases[] = {
      {0, 1.0, 0.76519768655796655145},        {1, 2.5, 0.49709410246427403801},
      {5, 10.0, -0.23406152818679364044},      {20, 15.0, 0.0073602340792234852583},
      {100, 50.0, 1.115927369083809278e-21},   {0, 4000.0, -0.012608844878571355811},
      {37, 4095.5, -0.012256775355988936514},  {300, 310.0, 0.057419004509027767805},
      {512, 100.0, 1.6024868750338141047e-299},
  };
  for (const auto& c : cases) {
    EXPECT_NEAR(bessel_j(c.order, c.x), c.value, 1e-13) << "order " << c.order << " x " << c.x;
  }
  EXPECT_NEAR(bessel_j(100, 50.0) / 1.115927369083809278e-21, 1.0, 1e-12);
}

TEST(Bessel, MatchesIntegralFormOracle) {
  double worst = 0.0;
  for (double x : {0.01, 0.5, 3.0, 7.7, 25.0, 63.9, 140.0, 500.0, 2047.0}) {
    for (int l : {0, 1, 2, 5, 13, 40, 77, 150, 400}) {
      worst = std::max(worst, std::abs(bessel_j(l, x) - oracle::bessel_integral(l, x)));
    }
  }
  EXPECT_LT(worst, 1e-13);
}

TEST(Bessel, SequenceMatchesSingleEvaluations) {
  const auto seq = ftk::bessel_j_sequence(60, 33.3);
  for (int l = 0; l <= 60; ++l) EXPECT_NEAR(seq[l], bessel_j(l, 33.3), 1e-15);
}

TEST(Bessel, TinyArgumentSeries) {
  const double x = 3e-7;
  EXPECT_NEAR(bessel_j(0, x), 1.0 - x * x / 4.0, 1e-16);
  EXPECT_NEAR(bessel_j(1, x), x / 2.0, 1e-20);
  EXPECT_NEAR(bessel_j(1, 2e-6), oracle::bessel_integral(1, 2e-6), 1e-16);
}

TEST(Bessel, DomainErrors) {
  EXPECT_THROW(bessel_j(513, 1.0), ftk::DomainError);
  EXPECT_THROW(bessel_j(-513, 1.0), ftk::DomainError);
  EXPECT_THROW(bessel_j(0, -1e-3), ftk::DomainError);
  EXPECT_THROW(bessel_j(0, 4096.5), ftk::DomainError);
  EXPECT_THROW(bessel_j(0, std::nan("")), ftk::DomainError);
  EXPECT_NO_THROW(bessel_j(512, 4096.0));
}

TEST(Bessel, DecayBeyondTurningPoint) {
  for (double z = 0.5; z <= 64.0; z += 3.7) {
    const int l = static_cast<int>(std::ceil(z + 10.0 * std::cbrt(z) + 20.0));
    for (int k = l; k < l + 30; ++k) EXPECT_LT(std::abs(bessel_j(k, z)), 1e-10);
  }
}

// With L = ceil(z + 8 z^(1/3)) the dropped tail 2 sum_{l > L} |J_l(z)| is
// about 1e-10 at small W, so the partial sum is checked against that tail
// and the 1e-12 level is checked with a few extra terms.
TEST(Bessel, JacobiAngerPartialSums) {
  for (double W : {0.5, 1.0, 2.0, 3.0}) {
    const double zmax = 2.0 * kPi * W;
    const int L = static_cast<int>(std::ceil(zmax + 8.0 * std::cbrt(zmax)));
    for (int extra : {0, 8}) {
      const int top = L + extra;
      double worst_excess = 0.0, worst = 0.0;
      for (int s = 0; s <= 20; ++s) {
        const double z = zmax * s / 20.0;
        const auto j = ftk::bessel_j_sequence(top + 60, z);
        double tail = 0.0;
        for (int l = top + 1; l <= top + 60; ++l) tail += 2.0 * std::abs(j[l]);
        for (double phi : {0.0, 0.4, 1.3, 2.9, 4.4, 6.0}) {
          std::complex<double> sum = 0.0;
          for (int l = -top; l <= top; ++l) {
            const double jl = (l < 0 && (-l) % 2 == 1) ? -j[-l] : j[std::abs(l)];
            sum += jl * std::polar(1.0, l * (phi - kPi / 2.0));
          }
          const double err = std::abs(std::polar(1.0, -z * std::cos(phi)) - sum);
          worst = std::max(worst, err);
          worst_excess = std::max(worst_excess, err - tail);
        }
      }
      EXPECT_LT(worst_excess, 1e-13) << "W = " << W << " extra " << extra;
      if (extra > 0) {
        EXPECT_LT(worst, 1e-12) << "W = " << W;
      }
    }
  }
}

TEST(GaussJacobi, OnePointRule) {
  const auto r = gauss_jacobi_rule(1, 1.0);
  ASSERT_EQ(r.size(), 1);
  EXPECT_NEAR(r.nodes[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.weights[0], 0.5, 1e-15);
}

TEST(GaussJacobi, ZeroCountRejected) {
  EXPECT_THROW(gauss_jacobi_rule(0, 1.0), ftk::ArgumentError);
  EXPECT_THROW(gauss_jacobi_rule(3, 0.0), ftk::ArgumentError);
}

TEST(GaussJacobi, NinthMoment) {
  const auto r = gauss_jacobi_rule(8, 1.0);
  double s = 0.0;
  for (int i = 0; i < r.size(); ++i) s += std::pow(r.nodes[i], 9) * r.weights[i];
  EXPECT_NEAR(s, 1.0 / 11.0, 1e-14);
}

TEST(GaussJacobi, ExactnessAllDegrees) {
  const double K = kPi * 64 / 2.0;
  for (double R : {1.0, K}) {
    for (int M = 1; M <= 64; ++M) {
      const auto r = gauss_jacobi_rule(M, R);
      double wsum = 0.0;
      for (int i = 0; i < M; ++i) {
        wsum += r.weights[i];
        ASSERT_GT(r.weights[i], 0.0);
        ASSERT_GT(r.nodes[i], 0.0);
        ASSERT_LT(r.nodes[i], R);
        if (i > 0) {
          ASSERT_GT(r.nodes[i], r.nodes[i - 1]);
        }
      }
      EXPECT_NEAR(wsum / (R * R / 2.0), 1.0, 1e-12);
      // Moments of (k/R)^j against k dk: R^2 / (j + 2).
      for (int j = 0; j <= 2 * M - 1; ++j) {
        double s = 0.0;
        for (int i = 0; i < M; ++i) s += std::pow(r.nodes[i] / R, j) * r.weights[i];
        EXPECT_NEAR(s / (R * R / (j + 2.0)), 1.0, 1e-12) << "M " << M << " j " << j << " R " << R;
      }
    }
  }
}

TEST(GaussJacobi, ScalingLaw) {
  const auto unit = gauss_jacobi_rule(17, 1.0);
  const auto scaled = gauss_jacobi_rule(17, 3.5);
  for (int i = 0; i < 17; ++i) {
    EXPECT_NEAR(scaled.nodes[i], 3.5 * unit.nodes[i], 1e-14);
    EXPECT_NEAR(scaled.weights[i], 3.5 * 3.5 * unit.weights[i], 1e-13);
  }
}

TEST(JacobiBasis, ConstantElement) {
  for (double R : {1.0, 0.3, 100.5}) {
    RadialJacobiBasis basis(5, R);
    for (double x : {0.0, 0.2 * R, R}) EXPECT_NEAR(basis.eval(0, x), std::sqrt(2.0) / R, 1e-15);
  }
}

TEST(JacobiBasis, IndexOutOfRange) {
  RadialJacobiBasis basis(4, 1.0);
  EXPECT_THROW((void)basis.eval(4, 0.5), ftk::ArgumentError);
  EXPECT_THROW((void)basis.eval(-1, 0.5), ftk::ArgumentError);
}

TEST(JacobiBasis, GramIsIdentity) {
  for (double R : {1.0, 0.19, 100.5}) {
    const int P = 60;
    RadialJacobiBasis basis(P, R);
    const auto rule = gauss_jacobi_rule(2 * P, R);
    std::vector<std::vector<double>> vals(rule.size(), std::vector<double>(P));
    for (int i = 0; i < rule.size(); ++i) basis.eval_all(rule.nodes[i], vals[i]);
    double worst = 0.0;
    for (int a = 0; a < P; ++a)
      for (int b = 0; b < P; ++b) {
        double s = 0.0;
        for (int i = 0; i < rule.size(); ++i) s += vals[i][a] * vals[i][b] * rule.weights[i];
        worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
      }
    EXPECT_LT(worst, 1e-10) << "R = " << R;
  }
}

TEST(JacobiBasis, EvalAllMatchesEval) {
  RadialJacobiBasis basis(30, 2.0);
  std::vector<double> all(30);
  basis.eval_all(1.37, all);
  for (int j = 0; j < 30; ++j) EXPECT_NEAR(all[j], basis.eval(j, 1.37), 1e-12);
}

TEST(JacobiBasis, SignChangesEqualDegree) {
  const double R = 2.5;
  RadialJacobiBasis basis(25, R);
  const int samples = 20000;
  for (int j = 0; j < 25; ++j) {
    int changes = 0;
    double prev = basis.eval(j, R * 0.5 / samples);
    for (int s = 1; s < samples; ++s) {
      const double v = basis.eval(j, R * (s + 0.5) / samples);
      if ((v > 0) != (prev > 0)) ++changes;
      prev = v;
    }
    EXPECT_EQ(changes, j);
  }
}

}  // namespace
