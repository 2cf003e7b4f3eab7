#include "ftk/kernel_factorization.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ftk/errors.hpp"

namespace ftk {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTailFactor = 1e-2;
constexpr int kTailWidth = 2;

// Rows are basis values at the rule nodes, each scaled by its weight.
Eigen::MatrixXd weighted_basis(const QuadratureRule& rule, int P) {
  RadialJacobiBasis basis(P, rule.radius);
  Eigen::MatrixXd out(rule.size(), P);
  std::vector<double> row(P);
  for (int a = 0; a < rule.size(); ++a) {
    basis.eval_all(rule.nodes[a], row);
    for (int j = 0; j < P; ++j) out(a, j) = row[j] * rule.weights[a];
  }
  return out;
}

Eigen::MatrixXd basis_values(int P, double radius, std::span<const double> xs) {
  RadialJacobiBasis basis(P, radius);
  Eigen::MatrixXd out(xs.size(), P);
  std::vector<double> row(P);
  for (std::size_t a = 0; a < xs.size(); ++a) {
    basis.eval_all(xs[a], row);
    for (int j = 0; j < P; ++j) out(static_cast<Eigen::Index>(a), j) = row[j];
  }
  return out;
}

ModalSVD modal_from_projection(int ell, double D, double K, double eps, const Eigen::MatrixXd& c) {
  const int P = static_cast<int>(c.rows());
  const double tail = std::max(c.bottomRows(kTailWidth).cwiseAbs().maxCoeff(),
                               c.rightCols(kTailWidth).cwiseAbs().maxCoeff());
  if (!(tail < eps * kTailFactor)) {
    throw NumericalError("modal_svd: projected coefficient tail " + std::to_string(tail) +
                         " for l=" + std::to_string(ell) + " exceeds eps*1e-2; increase the basis size P (now " +
                         std::to_string(P) + ")");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  ModalSVD out;
  out.ell = ell;
  out.D = D;
  out.K = K;
  out.sigma = svd.singularValues();
  out.u = svd.matrixU();
  out.v = svd.matrixV();
  // Largest-magnitude coefficient of each left vector is positive.
  for (int eta = 0; eta < P; ++eta) {
    Eigen::Index idx = 0;
    out.u.col(eta).cwiseAbs().maxCoeff(&idx);
    if (out.u(idx, eta) < 0.0) {
      out.u.col(eta) *= -1.0;
      out.v.col(eta) *= -1.0;
    }
  }
  out.rank = 0;
  while (out.rank < P && out.sigma[out.rank] > eps) ++out.rank;
  return out;
}

void check_plan_args(double D, double K, double eps, int P) {
  if (!(D > 0.0) || !(K > 0.0)) throw ArgumentError("kernel factorization: D and K must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("kernel factorization: eps must lie in (0, 1)");
  if (P < kTailWidth + 1) throw ArgumentError("kernel factorization: basis size too small");
}

double signed_bessel_sign(int ell) { return (ell < 0 && (-ell) % 2 != 0) ? -1.0 : 1.0; }

}  // namespace

Eigen::MatrixXd ModalSVD::left_values(std::span<const double> deltas) const {
  return basis_values(basis_size(), D, deltas) * u;
}

Eigen::MatrixXd ModalSVD::right_values(std::span<const double> ks) const {
  return basis_values(basis_size(), K, ks) * v;
}

int default_basis_size(double W) { return static_cast<int>(std::ceil(2.0 * kPi * W)) + 48; }

ModalSVD modal_svd(int ell, double D, double K, double eps, int P) {
  check_plan_args(D, K, eps, P);
  const int order = std::abs(ell);
  const auto rd = gauss_jacobi_rule(2 * P, D);
  const auto rk = gauss_jacobi_rule(2 * P, K);
  Eigen::MatrixXd kernel(2 * P, 2 * P);
  for (int a = 0; a < 2 * P; ++a)
    for (int b = 0; b < 2 * P; ++b) kernel(a, b) = bessel_j(order, rd.nodes[a] * rk.nodes[b]);
  const Eigen::MatrixXd c = weighted_basis(rd, P).transpose() * kernel * weighted_basis(rk, P);
  ModalSVD out = modal_from_projection(order, D, K, eps, c);
  if (ell < 0) {
    out.ell = ell;
    out.u *= signed_bessel_sign(ell);
  }
  return out;
}

int rank_bound(int ell, double W, double eps) {
  if (!(eps > 0.0 && eps < 1.0) || !(W > 0.0)) throw ArgumentError("rank_bound: need eps in (0,1), W > 0");
  const double half = std::abs(ell) / 2.0;
  const double a = kPi * std::exp(2.0) * W - half;
  const double b = std::log(2.0 * kPi * W / eps) + 1.5 - half;
  return static_cast<int>(std::ceil(std::max({0.0, a, b})));
}

int total_rank_bound(double W, double eps) {
  if (!(eps > 0.0 && eps < 1.0) || !(W > 0.0)) throw ArgumentError("total_rank_bound: need eps in (0,1), W > 0");
  const double h = std::max(kPi * std::exp(2.0) * W, std::log(2.0 * kPi * W / eps)) + 1.5;
  const double c = std::ceil(h);
  return static_cast<int>(2.0 * c * c);
}

int max_kernel_order(double W, double eps) {
  int ell = static_cast<int>(std::floor(2.0 * std::max(kPi * std::exp(2.0) * W,
                                                       std::log(2.0 * kPi * W / eps) + 1.5)));
  ell = std::max(ell - 1, 0);
  while (rank_bound(ell, W, eps) > 0) ++ell;
  return ell;
}

int TranslationKernelSVD::modal_rank(int ell) const {
  const int a = std::abs(ell);
  return a < static_cast<int>(modes.size()) ? modes[a].rank : 0;
}

const ModalSVD& TranslationKernelSVD::mode(int ell) const {
  const int a = std::abs(ell);
  if (a >= static_cast<int>(modes.size())) throw ArgumentError("TranslationKernelSVD: mode out of range");
  return modes[a];
}

void TranslationKernelSVD::finalize() {
  all_terms.clear();
  rank_ = 0;
  for (const auto& m : modes) {
    for (int eta = 0; eta < m.basis_size(); ++eta) {
      all_terms.push_back({m.ell, eta, m.sigma[eta]});
      if (m.ell != 0) all_terms.push_back({-m.ell, eta, m.sigma[eta]});
    }
    rank_ += m.ell == 0 ? m.rank : 2 * m.rank;
  }
  std::sort(all_terms.begin(), all_terms.end(), [](const SvdTerm& x, const SvdTerm& y) {
    if (x.sigma != y.sigma) return x.sigma > y.sigma;
    if (std::abs(x.ell) != std::abs(y.ell)) return std::abs(x.ell) < std::abs(y.ell);
    if (x.ell != y.ell) return x.ell > y.ell;
    return x.eta < y.eta;
  });
  // Per-mode truncation at sigma > eps keeps exactly the leading block.
  for (int z = 0; z < rank_; ++z) {
    if (!(all_terms[z].sigma > eps)) throw NumericalError("TranslationKernelSVD: inconsistent truncation");
  }
}

TranslationKernelSVD assemble_svd(double W, double K, double eps, int P) {
  if (!(eps > 0.0 && eps < 0.5)) throw ArgumentError("assemble_svd: eps must lie in (0, 0.5)");
  if (!(W > 0.0)) throw ArgumentError("assemble_svd: W must be positive");
  if (P <= 0) P = default_basis_size(W);
  const double D = 2.0 * kPi * W / K;
  check_plan_args(D, K, eps, P);

  const int lmax = max_kernel_order(W, eps);
  const int nodes = 2 * P;
  const auto rd = gauss_jacobi_rule(nodes, D);
  const auto rk = gauss_jacobi_rule(nodes, K);
  const Eigen::MatrixXd phi = weighted_basis(rd, P);
  const Eigen::MatrixXd psi = weighted_basis(rk, P);

  // table[l](a, b) = J_l(delta_a k_b), one Miller sweep per node pair.
  std::vector<Eigen::MatrixXd> table(lmax + 1, Eigen::MatrixXd(nodes, nodes));
  std::vector<double> seq(lmax + 1);
  for (int a = 0; a < nodes; ++a)
    for (int b = 0; b < nodes; ++b) {
      bessel_j_sequence(rd.nodes[a] * rk.nodes[b], seq);
      for (int l = 0; l <= lmax; ++l) table[l](a, b) = seq[l];
    }

  TranslationKernelSVD out;
  out.W = W;
  out.D = D;
  out.K = K;
  out.eps = eps;
  out.P = P;
  out.modes.reserve(lmax + 1);
  for (int l = 0; l <= lmax; ++l) {
    const Eigen::MatrixXd c = phi.transpose() * table[l] * psi;
    out.modes.push_back(modal_from_projection(l, D, K, eps, c));
  }
  out.finalize();
  return out;
}

double hs_error(const TranslationKernelSVD& svd, int h_prime) {
  if (h_prime < 0) throw ArgumentError("hs_error: negative term count");
  double s = 0.0;
  for (std::size_t z = svd.all_terms.size(); z-- > static_cast<std::size_t>(h_prime);) {
    s += svd.all_terms[z].sigma * svd.all_terms[z].sigma;
  }
  return 2.0 * kPi * std::sqrt(s);
}

cdouble eval_left(const TranslationKernelSVD& svd, int zeta, double delta_x, double delta_y) {
  if (zeta < 0 || zeta >= static_cast<int>(svd.all_terms.size())) throw ArgumentError("eval_left: index out of range");
  const SvdTerm& t = svd.all_terms[zeta];
  const ModalSVD& m = svd.mode(t.ell);
  const double delta = std::hypot(delta_x, delta_y);
  const double omega = std::atan2(delta_y, delta_x);
  const double value = m.left_values(std::span<const double>(&delta, 1))(0, t.eta) * signed_bessel_sign(t.ell);
  return value * std::polar(1.0, -t.ell * (omega + kPi / 2.0));
}

cdouble eval_right(const TranslationKernelSVD& svd, int zeta, double k_x, double k_y) {
  if (zeta < 0 || zeta >= static_cast<int>(svd.all_terms.size())) throw ArgumentError("eval_right: index out of range");
  const SvdTerm& t = svd.all_terms[zeta];
  const ModalSVD& m = svd.mode(t.ell);
  const double k = std::hypot(k_x, k_y);
  const double psi = std::atan2(k_y, k_x);
  const double value = m.right_values(std::span<const double>(&k, 1))(0, t.eta);
  return value * std::polar(1.0, t.ell * psi);
}

double x_error_bound(const TranslationKernelSVD& svd, int H, const FourierBesselCoeffs& a,
                     const FourierBesselCoeffs& b) {
  if (H < 0) throw ArgumentError("x_error_bound: negative H");
  if (a.radial_count() != b.radial_count() || !a.rule) throw ArgumentError("x_error_bound: mismatched coefficients");
  const double next = H < static_cast<int>(svd.all_terms.size()) ? svd.all_terms[H].sigma : 0.0;
  double energy = 0.0;
  for (int m = 0; m < a.radial_count(); ++m) {
    const double ea = 2.0 * kPi * a.values.row(m).squaredNorm();
    const double eb = 2.0 * kPi * b.values.row(m).squaredNorm();
    energy += a.rule->weights[m] * ea * eb;
  }
  const double measure = 2.0 * kPi * kPi * svd.D * svd.D;
  return 2.0 * kPi * next * std::sqrt(energy / measure);
}

}  // namespace ftk
