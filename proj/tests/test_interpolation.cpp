#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ftk/errors.hpp"
#include "ftk/interpolation.hpp"

namespace {

using namespace ftk;
constexpr double kPi = std::numbers::pi;

struct Setup {
  double K = nyquist_frequency(64);
  double D = shift_radius(64, 1.0);
  int Q = default_angular_order(K);
  RulePtr rule = std::make_shared<const QuadratureRule>(gauss_jacobi_rule(64, K));
  PolarFourierSamples pa;
  FourierBesselCoeffs cb;

  Setup() {
    pa = polar_fourier(gen_gaussian_blobs(21, 64), rule, Q);
    cb = fb_decompose(polar_fourier(gen_gaussian_blobs(22, 64), rule, Q));
  }
};

const Setup& setup() {
  static const Setup s;
  return s;
}

std::vector<cdouble> as_complex(const Eigen::VectorXd& w) { return {w.data(), w.data() + w.size()}; }

double rms(const Eigen::MatrixXd& m) { return std::sqrt(m.squaredNorm() / static_cast<double>(m.size())); }

// Ten nodes: origin, three at D/2, six at D.
TranslationGrid small_rings(double D) { return ring_translation_grid(D, 2, 1.0 / D); }

// ---------------------------------------------------------------- bilinear

TEST(Bilinear, NodesCoverTheDisk) {
  const double D = 0.1, h = 0.023;
  const auto nodes = bilinear_nodes(D, h);
  const auto match = match_shifts(make_translation_grid(D, h), nodes, 1e-12);
  EXPECT_EQ(std::count(match.begin(), match.end(), -1), 0);
  const auto queries = make_translation_grid(D, h / 3.7);
  const auto st = bilinear_stencils(nodes, h, queries);
  for (int q = 0; q < queries.size(); ++q) {
    double sum = 0.0, x = 0.0, y = 0.0;
    for (int c = 0; c < 4; ++c) {
      EXPECT_GE(st[q].weight[c], 0.0);
      sum += st[q].weight[c];
      x += st[q].weight[c] * nodes.x[st[q].node[c]];
      y += st[q].weight[c] * nodes.y[st[q].node[c]];
    }
    EXPECT_NEAR(sum, 1.0, 1e-14);
    // Bilinear weights reproduce linear functions.
    EXPECT_NEAR(x, queries.x[q], 1e-14);
    EXPECT_NEAR(y, queries.y[q], 1e-14);
  }
}

TEST(Bilinear, QueryAtNodeIsExact) {
  const auto& s = setup();
  const double h = s.D / 3;
  const auto tgrid = make_translation_grid(s.D, h);
  const RotationGrid rgrid(2 * s.Q);
  const auto lin = linear_interp_align(s.pa, s.cb, h, tgrid, rgrid);
  const auto exact = bft_align(s.pa, s.cb, tgrid, rgrid);
  EXPECT_EQ(lin.engine, "linear");
  EXPECT_LE((lin.values - exact.values).cwiseAbs().maxCoeff(), 1e-14 * exact.values.cwiseAbs().maxCoeff());
}

TEST(Bilinear, ErrorIsSecondOrderInPitch) {
  const auto& s = setup();
  // Query pitch incommensurate with every node pitch below.
  const auto tgrid = make_translation_grid(s.D, s.D / 9.7);
  const RotationGrid rgrid(64);
  const auto exact = bft_align(s.pa, s.cb, tgrid, rgrid);
  std::vector<double> err;
  for (double f : {1.0 / 4, 1.0 / 8, 1.0 / 16}) {
    err.push_back(rms(linear_interp_align(s.pa, s.cb, f * s.D, tgrid, rgrid).values - exact.values));
  }
  const double order = std::log2(err[1] / err[2]);
  EXPECT_GE(order, 1.8) << err[0] << " " << err[1] << " " << err[2];
  EXPECT_LT(err[1], err[0]);

  const double hs_order = std::log2(bilinear_hs_error(s.D, s.D / 8, s.K) / bilinear_hs_error(s.D, s.D / 16, s.K));
  EXPECT_NEAR(hs_order, 2.0, 0.2);
}

TEST(Bilinear, PointwiseErrorMatchesGramForm) {
  const auto& s = setup();
  const double h = s.D / 5;
  const auto nodes = bilinear_nodes(s.D, h);
  const auto queries = explicit_translation_grid(s.D, {0.31 * s.D, -0.52 * s.D, 0.0, 0.4 * s.D},
                                                 {0.12 * s.D, 0.77 * s.D, 0.0, 0.4 * s.D});
  const auto st = bilinear_stencils(nodes, h, queries);
  for (int q = 0; q < queries.size(); ++q) {
    const std::vector<int> idx(st[q].node.begin(), st[q].node.end());
    const std::vector<double> w(st[q].weight.begin(), st[q].weight.end());
    const double gram = plane_wave_residual(nodes, idx, w, queries.x[q], queries.y[q], s.K);
    EXPECT_NEAR(bilinear_shift_error(s.D, h, s.K, queries.x[q], queries.y[q]), gram, 1e-6 * std::sqrt(kPi) * s.K);
  }
  EXPECT_EQ(bilinear_shift_error(s.D, h, s.K, 2 * h, -h), 0.0);
}

TEST(Bilinear, HsErrorAgreesWithPolarQuadrature) {
  const auto& s = setup();
  const double h = s.D / 6;
  // Brute-force polar quadrature of the pointwise error; the integrand has
  // kinks on cell edges, so only a few digits are expected.
  const QuadratureRule r = gauss_jacobi_rule(120, s.D);
  const int angles = 400;
  double total = 0.0;
  for (int i = 0; i < r.size(); ++i) {
    for (int p = 0; p < angles; ++p) {
      const double t = 2 * kPi * (p + 0.5) / angles;
      const double e = bilinear_shift_error(s.D, h, s.K, r.nodes[i] * std::cos(t), r.nodes[i] * std::sin(t));
      total += r.weights[i] * (2 * kPi / angles) * e * e;
    }
  }
  EXPECT_NEAR(bilinear_hs_error(s.D, h, s.K) / std::sqrt(total), 1.0, 3e-3);
}

TEST(Bilinear, DiskKernelMatchesBesselIntegral) {
  const double K = 50.0;
  for (double r : {0.0, 0.003, 0.04, 0.2}) {
    EXPECT_NEAR(disk_kernel(r, K), 2 * kPi * bessel_product_integral(0, r, 0.0, K), 1e-10 * disk_kernel(0.0, K));
  }
}

TEST(Bilinear, PitchSearch) {
  const double D = 0.1;
  const double h = bilinear_pitch_for_nodes(D, 200);
  EXPECT_NEAR(bilinear_nodes(D, h).size(), 200, 20);
  double pitch = 0.0;
  const int count = bilinear_nodes_for_error(D, 40.0, 0.5, &pitch);
  EXPECT_LE(bilinear_hs_error(D, pitch, 40.0), 0.5);
  EXPECT_GT(bilinear_hs_error(D, pitch * 1.05, 40.0), 0.5 * 0.98);
  EXPECT_EQ(count, bilinear_nodes(D, pitch).size());
}

// ---------------------------------------------------------------- least squares

TEST(LsKernel, PublishedDiagonalIsOne) {
  EXPECT_EQ(ls_kernel_published(0.0, 100.0), 1.0);
  EXPECT_DOUBLE_EQ(ls_kernel_graf(0.0, 10.0), 50.0);
}

TEST(LsKernel, GrafFormMatchesQuadratureOracle) {
  const auto& s = setup();
  const auto nodes = small_rings(s.D);
  const LsKernelCheck c = validate_ls_kernel(nodes, s.K);
  EXPECT_EQ(c.path, LsKernelPath::Graf);
  EXPECT_LT(c.graf_misfit, 1e-10);
  EXPECT_NEAR(c.scale, 1.0, 1e-10);
  // The published closed form is not proportional to its integral.
  EXPECT_GT(c.published_misfit, 1e-2);
  for (double r : {1e-3, 0.02, 0.05}) {
    EXPECT_NEAR(ls_kernel_quadrature(0.01, 0.0, 0.01 + r * 0.6, r * 0.8, s.K), ls_kernel_graf(r, s.K),
                1e-10 * ls_kernel_graf(0.0, s.K));
  }
}

TEST(LsKernel, DerivativeMatchesDifferences) {
  const double K = 80.0;
  for (double r : {1e-4, 0.01, 0.03, 0.09}) {
    const double d = 1e-6 * std::max(r, 1e-3);
    const double fd = (ls_kernel_graf(r + d, K) - ls_kernel_graf(r - d, K)) / (2 * d);
    EXPECT_NEAR(ls_kernel_graf_derivative(r, K), fd, 1e-6 * K * K * K);
  }
}

TEST(LsWeights, NodeQueryIsBasisVector) {
  const auto& s = setup();
  const auto nodes = small_rings(s.D);
  for (int z : {0, 3, 9}) {
    const LsWeights w = ls_weights(nodes, nodes.x[z], nodes.y[z], s.K);
    EXPECT_EQ(w.weights, Eigen::VectorXd::Unit(nodes.size(), z));
    EXPECT_EQ(w.path, LsKernelPath::Graf);
  }
}

TEST(LsWeights, SolveReproducesKernelColumn) {
  const auto& s = setup();
  const auto nodes = small_rings(s.D);
  const LsWeights w = ls_weights(nodes, 0.3 * s.D, -0.2 * s.D, s.K);
  EXPECT_LT(w.condition, 1e6);
  for (int a = 0; a < nodes.size(); ++a) {
    double lhs = 0.0;
    for (int b = 0; b < nodes.size(); ++b)
      lhs += ls_kernel_graf(std::hypot(nodes.x[a] - nodes.x[b], nodes.y[a] - nodes.y[b]), s.K) * w.weights(b);
    EXPECT_NEAR(lhs, ls_kernel_graf(std::hypot(nodes.x[a] - 0.3 * s.D, nodes.y[a] + 0.2 * s.D), s.K),
                1e-10 * ls_kernel_graf(0.0, s.K));
  }
}

TEST(LsWeights, RejectsRepeatedAndCrowdedNodes) {
  const auto& s = setup();
  EXPECT_THROW(ls_weights(explicit_translation_grid(s.D, {0.0, 0.0}, {0.01, 0.01}), 0.0, 0.0, s.K),
               ArgumentError);
  std::vector<double> x, y;
  for (int i = 0; i < 6; ++i) {
    x.push_back(1e-4 * s.D * i);
    y.push_back(0.0);
  }
  EXPECT_THROW(ls_weights(explicit_translation_grid(s.D, x, y), 0.5 * s.D, 0.0, s.K), NumericalError);
}

TEST(LsWeights, ResidualMatchesModalQuadrature) {
  const auto& s = setup();
  const auto nodes = small_rings(s.D);
  const int L = oracle_translation_order(s.D, s.K);
  for (double t : {0.2, 1.3, 2.9}) {
    const double qx = 0.55 * s.D * std::cos(t), qy = 0.55 * s.D * std::sin(t);
    const LsWeights w = ls_weights(nodes, qx, qy, s.K);
    double gy = 0.0;
    for (int z = 0; z < nodes.size(); ++z)
      gy += w.weights(z) * ls_kernel_graf(std::hypot(nodes.x[z] - qx, nodes.y[z] - qy), s.K);
    const double closed = 2 * kPi * (ls_kernel_graf(0.0, s.K) - gy);
    const double quad = modal_residual(nodes, qx, qy, s.K, L, [&](int) { return as_complex(w.weights); });
    EXPECT_NEAR(quad / closed, 1.0, 1e-8);
  }
}

TEST(LsDescent, GradientMatchesCentralDifferences) {
  const auto& s = setup();
  auto nodes = small_rings(s.D);
  nodes.x[4] += 0.05 * s.D;  // break the symmetry so every component is nonzero
  const LsObjective obj(s.D, s.K);
  Eigen::VectorXd g;
  obj.value_and_gradient(nodes, &g);
  const double step = 1e-6 * s.D;
  for (int i = 0; i < 2 * nodes.size(); ++i) {
    auto p = nodes, m = nodes;
    auto& pc = (i % 2 == 0) ? p.x : p.y;
    auto& mc = (i % 2 == 0) ? m.x : m.y;
    pc[i / 2] += step;
    mc[i / 2] -= step;
    const double fd = (obj.value(p) - obj.value(m)) / (2 * step);
    EXPECT_NEAR(g(i), fd, 1e-5 * g.cwiseAbs().maxCoeff()) << "component " << i;
  }
}

TEST(LsDescent, MonotoneAndInsideDisk) {
  const auto& s = setup();
  const auto r = ls_node_descent(small_rings(s.D), s.K, s.D, 8, 1e-3 * s.D * s.D);
  ASSERT_GE(r.history.size(), 2u);
  for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_LE(r.history[i], r.history[i - 1]);
  EXPECT_LT(r.history.back(), r.history.front());
  for (int z = 0; z < r.nodes.size(); ++z) EXPECT_LE(r.nodes.radius(z), s.D * (1 + 1e-12));
}

TEST(LsDescent, SymmetricSingleNodeIsStationary) {
  const auto& s = setup();
  const auto r = ls_node_descent(explicit_translation_grid(s.D, {0.0}, {0.0}), s.K, s.D, 3, 1e-3 * s.D * s.D);
  for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_LT(std::abs(r.history[i] - r.history[i - 1]), 1e-10);
  EXPECT_LT(std::hypot(r.nodes.x[0], r.nodes.y[0]), 1e-12 * s.D);
}

// ---------------------------------------------------------------- generalized least squares

TEST(Gls, BesselProductMatchesLommel) {
  const double K = 60.0;
  for (int ell : {0, 3, 11}) {
    for (double a : {0.01, 0.07}) {
      const double x = a * K;
      const double lommel = 0.5 * K * K *
                            (bessel_j(ell, x) * bessel_j(ell, x) - bessel_j(ell - 1, x) * bessel_j(ell + 1, x));
      EXPECT_NEAR(bessel_product_integral(ell, a, a, K), lommel, 1e-12 * K * K);
    }
  }
}

TEST(Gls, NodeQueryIsBasisVector) {
  const auto& s = setup();
  const auto nodes = small_rings(s.D);
  const auto w = gls_weights(nodes, nodes.x[5], nodes.y[5], 3, s.K);
  for (int z = 0; z < nodes.size(); ++z) EXPECT_EQ(w[z], cdouble(z == 5 ? 1.0 : 0.0));
}

TEST(Gls, SingleRingZeroModeIsRadialLs) {
  const auto& s = setup();
  const double rho = 0.6 * s.D;
  std::vector<double> x, y;
  for (int p = 0; p < 5; ++p) {
    x.push_back(rho * std::cos(2 * kPi * p / 5));
    y.push_back(rho * std::sin(2 * kPi * p / 5));
  }
  const auto nodes = explicit_translation_grid(s.D, x, y);
  const double delta = 0.25 * s.D;
  const auto w = gls_weights(nodes, delta, 0.0, 0, s.K);
  const double u = bessel_product_integral(0, rho, delta, s.K) / bessel_product_integral(0, rho, rho, s.K);
  for (const cdouble& v : w) EXPECT_NEAR(std::abs(v - u / 5), 0.0, 1e-12);
}

TEST(Gls, ResidualNeverExceedsLs) {
  const auto& s = setup();
  const auto nodes = small_rings(s.D);
  const int L = oracle_translation_order(s.D, s.K);
  const LsKernelCheck check = validate_ls_kernel(nodes, s.K);
  for (int i = 0; i < 6; ++i) {
    const double r = s.D * (0.15 + 0.14 * i), t = 0.7 + 1.1 * i;
    const double qx = r * std::cos(t), qy = r * std::sin(t);
    const LsWeights ls = ls_weights(nodes, qx, qy, s.K, check);
    const double e_ls = modal_residual(nodes, qx, qy, s.K, L, [&](int) { return as_complex(ls.weights); });
    const double e_gls = modal_residual(nodes, qx, qy, s.K, L, [&](int l) { return gls_weights(nodes, qx, qy, l, s.K); });
    EXPECT_LE(e_gls, e_ls * (1 + 1e-9) + 1e-12 * kPi * s.K * s.K);
  }
}

// ---------------------------------------------------------------- error profiles

TEST(ErrorProfile, FtkProfileIntegratesToHsError) {
  const auto& s = setup();
  const auto svd = assemble_svd(1.0, s.K, 1e-2);
  const QuadratureRule r = gauss_jacobi_rule(40, svd.D);
  for (int H : {10, svd.rank()}) {
    double total = 0.0;
    for (int i = 0; i < r.size(); ++i) {
      const double e = ftk_shift_error(svd, H, r.nodes[i]);
      total += 2 * kPi * r.weights[i] * e * e;
    }
    const double hs = hs_error(svd, H);
    EXPECT_NEAR(std::sqrt(total) / hs, 1.0, 1e-8);
  }
  EXPECT_LT(ftk_shift_error(svd, static_cast<int>(svd.all_terms.size()), svd.D), 1e-8);
  EXPECT_THROW(ftk_shift_error(svd, svd.rank(), 1.5 * svd.D), ArgumentError);
}

TEST(ErrorProfile, FtkErrorShrinksWithTerms) {
  const auto& s = setup();
  const auto svd = assemble_svd(2.0, s.K, 1e-2);
  double prev = std::numeric_limits<double>::infinity();
  for (int H : {20, 60, svd.rank(), svd.rank() + 40}) {
    const double e = ftk_shift_error(svd, H, 0.5 * svd.D);
    EXPECT_LT(e, prev);
    prev = e;
  }
}

}  // namespace
