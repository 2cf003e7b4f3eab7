#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ftk/errors.hpp"
#include "ftk/fourier_bessel.hpp"
#include "oracles.hpp"

namespace {

using namespace ftk;
constexpr double kPi = std::numbers::pi;

struct Grid {
  int n;
  double K;
  int Q;
  int M;
  RulePtr rule;
  explicit Grid(int size)
      : n(size), K(nyquist_frequency(size)), Q(default_angular_order(K)), M(default_radial_count(size)),
        rule(std::make_shared<const QuadratureRule>(gauss_jacobi_rule(M, K))) {}
};

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

double relative_image_error(const PixelImage& a, const PixelImage& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    num = std::max(num, std::abs(a.samples[i] - b.samples[i]));
    den = std::max(den, std::abs(b.samples[i]));
  }
  return num / den;
}

TEST(Params, Conventions) {
  EXPECT_NEAR(nyquist_frequency(64), 32 * kPi, 1e-12);
  EXPECT_EQ(default_angular_order(nyquist_frequency(64)), 138);
  EXPECT_NEAR(shift_radius(64, 1.0), 1.0 / 16.0, 1e-15);
  EXPECT_NEAR(shift_wavelengths(shift_radius(64, 2.0), nyquist_frequency(64)), 2.0, 1e-12);
  EXPECT_EQ(default_translation_order(1.0), static_cast<int>(std::ceil(2 * kPi + 8 * std::cbrt(2 * kPi))));
}

TEST(PixelImage, RejectsBadSizes) {
  EXPECT_THROW(PixelImage(3), ArgumentError);
  EXPECT_THROW(PixelImage(7), ArgumentError);
  PixelImage a(8);
  a.at(1, 1) = std::nan("");
  EXPECT_THROW(a.validate(), ArgumentError);
}

TEST(PolarFourier, ZeroImage) {
  Grid s(16);
  const auto out = polar_fourier(PixelImage(16), s.rule, s.Q);
  EXPECT_EQ(max_abs(out.values), 0.0);
}

TEST(PolarFourier, UnitPixelAtOrigin) {
  Grid s(32);
  PixelImage a(32);
  a.at(16, 16) = 1.0;
  const auto out = polar_fourier(a, s.rule, s.Q);
  const double dx2 = a.dx() * a.dx();
  for (int m = 0; m < out.radial_count(); ++m)
    for (int p = 0; p < out.angle_count(); ++p) EXPECT_NEAR(std::abs(out.values(m, p) - dx2), 0.0, 1e-16);
}

TEST(PolarFourier, RejectsBeyondNyquistAndBadTol) {
  PixelImage a(16);
  EXPECT_THROW(polar_fourier(a, 1.01 * kPi / a.dx(), 8, 8), DomainError);
  EXPECT_THROW(polar_fourier(a, nyquist_frequency(16), 8, 8, 1e-3), ArgumentError);
}

TEST(PolarFourier, MatchesDenseSumOracle) {
  Grid s(32);
  const auto a = gen_gaussian_blobs(11, 32);
  const auto out = polar_fourier(a, s.rule, s.Q);
  std::mt19937 rng(5);
  double worst = 0.0;
  for (int t = 0; t < 40; ++t) {
    const int m = static_cast<int>(rng() % out.radial_count());
    const int p = static_cast<int>(rng() % out.angle_count());
    const double k = s.rule->nodes[m];
    const double psi = out.angle(p);
    worst = std::max(worst, std::abs(out.values(m, p) - oracle::dense_fourier(a, k * std::cos(psi), k * std::sin(psi))));
  }
  EXPECT_LT(worst, 1e-12 * a.norm());
}

TEST(PolarFourier, IsotropicGaussianAgainstAnalyticTransform) {
  const int n = 64;
  Grid s(n);
  const double sigma = 0.2;
  const auto a = oracle::centered_gaussian(n, sigma);
  const auto out = polar_fourier(a, s.rule, s.Q);
  const double peak = 2 * kPi * sigma * sigma;
  double worst_trunc = 0.0, worst_analytic = 0.0;
  for (int m = 0; m < out.radial_count(); ++m) {
    const double k = s.rule->nodes[m];
    if (k > s.K / 2) break;
    for (int p = 0; p < out.angle_count(); p += 7) {
      const double psi = out.angle(p);
      const double kx = k * std::cos(psi), ky = k * std::sin(psi);
      // Separable lattice sum with analytic Gaussian transform and explicit tails.
      const cdouble ref = oracle::truncated_gaussian_1d(n, sigma, kx) * oracle::truncated_gaussian_1d(n, sigma, ky);
      worst_trunc = std::max(worst_trunc, std::abs(out.values(m, p) - ref));
      worst_analytic = std::max(worst_analytic, std::abs(out.values(m, p) - peak * std::exp(-0.5 * sigma * sigma * k * k)));
    }
  }
  EXPECT_LT(worst_trunc / peak, 1e-6);
  // The bare infinite-domain form differs only by the Gaussian's mass outside [-1, 1)^2.
  EXPECT_LT(worst_analytic / peak, 2e-6);
}

TEST(PolarFourier, ConjugateSymmetry) {
  Grid s(32);
  const auto out = polar_fourier(gen_gaussian_blobs(3, 32), s.rule, s.Q);
  const double scale = max_abs(out.values);
  for (int m = 0; m < out.radial_count(); ++m)
    for (int p = 0; p < s.Q; ++p)
      EXPECT_LT(std::abs(out.values(m, p + s.Q) - std::conj(out.values(m, p))), 1e-12 * scale);
}

TEST(FbDecompose, RadiallySymmetricImage) {
  Grid s(32);
  const auto c = fb_decompose(polar_fourier(oracle::centered_gaussian(32, 0.15), s.rule, s.Q));
  const double scale = max_abs(c.values);
  for (int q = -s.Q; q <= s.Q; ++q) {
    if (q == 0) continue;
    EXPECT_LT(c.values.col(c.column(q)).cwiseAbs().maxCoeff(), 1e-10 * scale) << q;
  }
}

TEST(FbDecompose, MatchesRealSpaceProjection) {
  Grid s(32);
  const auto a = gen_gaussian_blobs(21, 32);
  const auto c = fb_decompose(polar_fourier(a, s.rule, s.Q));
  const double scale = max_abs(c.values);
  for (int m : {0, 5, 17, 31}) {
    for (int q : {-9, -2, 0, 1, 4, 13, 30}) {
      const cdouble ref = oracle::fourier_bessel_projection(a, s.rule->nodes[m], q);
      EXPECT_LT(std::abs(c.coeff(m, q) - ref), 1e-6 * scale) << m << " " << q;
    }
  }
}

TEST(FbDecompose, RealityConstraintAndRoundTrip) {
  Grid s(32);
  const auto samples = polar_fourier(gen_gaussian_blobs(4, 32), s.rule, s.Q);
  const auto c = fb_decompose(samples);
  const double scale = max_abs(c.values);
  for (int m = 0; m < c.radial_count(); ++m)
    for (int q = 0; q <= s.Q; ++q) {
      const double sign = (q % 2 == 0) ? 1.0 : -1.0;
      EXPECT_LT(std::abs(c.coeff(m, -q) - sign * std::conj(c.coeff(m, q))), 1e-10 * scale);
    }
  const auto back = fb_synthesize(c);
  EXPECT_LT(max_abs(back.values - samples.values), 1e-13 * max_abs(samples.values));
}

TEST(FbDecompose, AngularDecay) {
  Grid s(64);
  const int Q = static_cast<int>(std::ceil(s.K + 14 * std::cbrt(s.K)));
  const auto c = fb_decompose(polar_fourier(gen_gaussian_blobs(8, 64), s.rule, Q));
  const double scale = max_abs(c.values);
  const double cut = s.K + 10 * std::cbrt(s.K);
  for (int q = -Q; q <= Q; ++q) {
    if (std::abs(q) <= cut) continue;
    EXPECT_LT(c.values.col(c.column(q)).cwiseAbs().maxCoeff(), 1e-6 * scale) << q;
  }
}

TEST(RotateCoeffs, IdentityAndGroupLaw) {
  Grid s(32);
  const auto c = fb_decompose(polar_fourier(gen_gaussian_blobs(6, 32), s.rule, s.Q));
  EXPECT_EQ(max_abs(rotate_coeffs(c, 0.0).values - c.values), 0.0);
  const auto two = rotate_coeffs(rotate_coeffs(c, 0.7), 1.9);
  const auto one = rotate_coeffs(c, 2.6);
  EXPECT_LT(max_abs(two.values - one.values), 1e-14 * max_abs(c.values) * 10);
}

TEST(RotateCoeffs, AgreesWithPixelRotation) {
  Grid s(64);
  const auto a = gen_gaussian_blobs(9, 64);
  const double gamma = 0.83;
  const auto expected = rotate_coeffs(fb_decompose(polar_fourier(a, s.rule, s.Q)), gamma);
  const auto rotated = fb_decompose(polar_fourier(transform_image(a, {0.0, 0.0, gamma}), s.rule, s.Q));
  EXPECT_LT(max_abs(rotated.values - expected.values), 1e-5 * max_abs(expected.values));
}

TEST(TranslationKernel, ZeroShift) {
  EXPECT_EQ(translation_kernel(0.0, 0.0, 50.0, 0), cdouble(1.0, 0.0));
  EXPECT_EQ(std::abs(translation_kernel(0.0, 0.0, 50.0, 3)), 0.0);
}

TEST(TranslationKernel, ModulusIndependentOfDirection) {
  for (double omega : {0.0, 0.5, 2.0, -1.2}) {
    const double d = 0.07;
    const cdouble v = translation_kernel(d * std::cos(omega), d * std::sin(omega), 80.0, 5);
    EXPECT_NEAR(std::abs(v), std::abs(bessel_j(5, d * 80.0)), 1e-15);
  }
}

TEST(TranslationKernel, JacobiAngerPlaneWave) {
  const double W = 2.0;
  const double K = nyquist_frequency(64);
  const double D = shift_radius(64, W);
  const int L = default_translation_order(W);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 25; ++t) {
    const double d = D * u(rng), omega = 2 * kPi * u(rng), k = K * u(rng), psi = 2 * kPi * u(rng);
    cdouble sum = 0.0;
    for (int l = -L; l <= L; ++l)
      sum += translation_kernel(d * std::cos(omega), d * std::sin(omega), k, l) * std::polar(1.0, l * psi);
    EXPECT_LT(std::abs(sum - std::polar(1.0, -d * k * std::cos(psi - omega))), 1e-10);
  }
}

TEST(TranslateCoeffs, ZeroShiftIsIdentity) {
  Grid s(32);
  const auto c = fb_decompose(polar_fourier(gen_gaussian_blobs(2, 32), s.rule, s.Q));
  EXPECT_LT(max_abs(translate_coeffs(c, 0.0, 0.0, 12).values - c.values), 1e-15 * max_abs(c.values));
}

TEST(TranslateCoeffs, MatchesPhaseMultiplication) {
  Grid s(64);
  const double W = 2.0;
  const double D = shift_radius(64, W);
  auto samples = polar_fourier(gen_gaussian_blobs(12, 64), s.rule, s.Q);
  const auto c = fb_decompose(samples);
  const double dxs = 0.6 * D, dys = -0.5 * D;
  const auto via_coeffs = translate_coeffs(c, dxs, dys, default_translation_order(W));
  apply_translation_phase(samples, dxs, dys);
  const auto via_phase = fb_decompose(samples);
  // Compare away from the |q| ~ Q edge where the zero extension truncates.
  const double cut = s.K + 2;
  double worst = 0.0;
  for (int q = -s.Q; q <= s.Q; ++q) {
    if (std::abs(q) > cut) continue;
    worst = std::max(worst, (via_coeffs.values.col(q + s.Q) - via_phase.values.col(q + s.Q)).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(worst, 1e-8 * max_abs(via_phase.values));
}

TEST(TranslateCoeffs, GroupLaw) {
  Grid s(64);
  const double W = 1.0;
  const double D = shift_radius(64, W);
  const int L = default_translation_order(2 * W);
  const auto c = fb_decompose(polar_fourier(gen_gaussian_blobs(13, 64), s.rule, s.Q));
  const auto two = translate_coeffs(translate_coeffs(c, 0.4 * D, 0.3 * D, L), -0.2 * D, 0.5 * D, L);
  const auto one = translate_coeffs(c, 0.2 * D, 0.8 * D, L);
  EXPECT_LT(max_abs(two.values - one.values), 1e-6 * max_abs(one.values));
}

TEST(Linearity, CoefficientOperators) {
  Grid s(32);
  const auto a = fb_decompose(polar_fourier(gen_gaussian_blobs(1, 32), s.rule, s.Q));
  const auto b = fb_decompose(polar_fourier(gen_gaussian_blobs(2, 32), s.rule, s.Q));
  auto mix = a;
  mix.values = 2.5 * a.values - 0.75 * b.values;
  const double scale = max_abs(mix.values);
  const auto r = rotate_coeffs(mix, 1.1);
  EXPECT_LT(max_abs(r.values - (2.5 * rotate_coeffs(a, 1.1).values - 0.75 * rotate_coeffs(b, 1.1).values)), 1e-13 * scale);
  const auto t = translate_coeffs(mix, 0.02, 0.01, 20);
  EXPECT_LT(max_abs(t.values - (2.5 * translate_coeffs(a, 0.02, 0.01, 20).values -
                                0.75 * translate_coeffs(b, 0.02, 0.01, 20).values)),
            1e-13 * scale);
}

TEST(Blobs, DeterministicAndNormalized) {
  const auto a = gen_gaussian_blobs(42, 64);
  const auto b = gen_gaussian_blobs(42, 64);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_NEAR(a.norm(), 1.0, 1e-12);
  EXPECT_NE(a.samples, gen_gaussian_blobs(43, 64).samples);
  EXPECT_THROW(gen_gaussian_blobs(1, 64, {.count = 0}), ArgumentError);
}

TEST(Blobs, CenteredIsotropicIsRadiallySymmetric) {
  Grid s(64);
  const auto a = gen_gaussian_blobs(5, 64, {.count = 1, .anisotropy_min = 1.0, .anisotropy_max = 1.0, .centered = true});
  const auto c = fb_decompose(polar_fourier(a, s.rule, s.Q));
  const double scale = max_abs(c.values);
  for (int q = 1; q <= s.Q; ++q) EXPECT_LT(c.values.col(c.column(q)).cwiseAbs().maxCoeff(), 1e-10 * scale);
}

TEST(TransformImage, Identity) {
  const auto a = gen_gaussian_blobs(31, 64);
  EXPECT_LT(relative_image_error(transform_image(a, {}), a), 1e-10);
}

TEST(TransformImage, OnePixelShift) {
  const int n = 64;
  const auto a = gen_gaussian_blobs(32, n);
  const auto shifted = transform_image(a, {a.dx(), 0.0, 0.0});
  PixelImage expected(n);
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < n; ++j) expected.at(i, j) = a.at(i - 1, j);
  EXPECT_LT(relative_image_error(shifted, expected), 1e-6);
}

TEST(TransformImage, RotationInverse) {
  const auto a = gen_gaussian_blobs(33, 64);
  const auto back = transform_image(transform_image(a, {0.0, 0.0, 1.234}), {0.0, 0.0, -1.234});
  EXPECT_LT(relative_image_error(back, a), 1e-8);
}

}  // namespace
