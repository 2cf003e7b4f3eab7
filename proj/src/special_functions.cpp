#include "ftk/special_functions.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "ftk/errors.hpp"

namespace ftk {
namespace {

constexpr double kRescaleThreshold = 1e250;
constexpr double kRescaleFactor = 1e-250;
constexpr double kSeriesThreshold = 1e-6;

void check_argument(double x) {
  if (!(x >= 0.0 && x <= kBesselArgMax)) {
    throw DomainError("bessel_j: argument " + std::to_string(x) +
                      " outside [0, " + std::to_string(kBesselArgMax) + "]");
  }
}

// Two-term ascending series, exact to rounding for x < 1e-6.
void small_argument_series(double x, std::span<double> out) {
  const double half = 0.5 * x;
  const double half_sq = half * half;
  double power_over_factorial = 1.0;  // (x/2)^l / l!
  for (std::size_t l = 0; l < out.size(); ++l) {
    if (l > 0) power_over_factorial *= half / static_cast<double>(l);
    out[l] = power_over_factorial * (1.0 - half_sq / static_cast<double>(l + 1));
  }
}

// Recurrence coefficients of the orthonormal Jacobi family (alpha=0, beta=1)
// on [-1, 1]: t p_j = b_{j+1} p_{j+1} + a_j p_j + b_j p_{j-1}.
double jacobi01_diag(int j) {
  return 1.0 / ((2.0 * j + 1.0) * (2.0 * j + 3.0));
}

double jacobi01_offdiag(int j) {  // b_j, j >= 1
  const double jd = j;
  return std::sqrt(jd * (jd + 1.0)) / (2.0 * jd + 1.0);
}

constexpr double kJacobi01Mass = 2.0;  // integral of (1 + t) over [-1, 1]

// Orthonormal values p_0..p_{count-1} at t plus p_count and its derivative.
struct JacobiEval {
  double sum_sq = 0.0;
  double last = 0.0;
  double last_derivative = 0.0;
};

JacobiEval eval_jacobi01(int count, double t) {
  JacobiEval result;
  double p_prev = 0.0;
  double p = 1.0 / std::sqrt(kJacobi01Mass);
  double dp_prev = 0.0;
  double dp = 0.0;
  for (int j = 0; j < count; ++j) {
    result.sum_sq += p * p;
    const double b_next = jacobi01_offdiag(j + 1);
    const double b_here = j > 0 ? jacobi01_offdiag(j) : 0.0;
    const double a = jacobi01_diag(j);
    const double p_next = ((t - a) * p - b_here * p_prev) / b_next;
    const double dp_next = (p + (t - a) * dp - b_here * dp_prev) / b_next;
    p_prev = p;
    p = p_next;
    dp_prev = dp;
    dp = dp_next;
  }
  result.last = p;
  result.last_derivative = dp;
  return result;
}

}  // namespace

void bessel_j_sequence(double x, std::span<double> out) {
  if (out.empty()) return;
  check_argument(x);
  if (x < kSeriesThreshold) {
    small_argument_series(x, out);
    return;
  }

  const int top = std::max(static_cast<int>(out.size()) - 1, static_cast<int>(x));
  int start = top + static_cast<int>(15.0 * std::cbrt(static_cast<double>(top))) + 40;
  if (start % 2 != 0) ++start;

  // Downward Miller recurrence from J_{start+1} = 0, normalized with
  // 1 = J_0 + 2 sum_k J_{2k}.
  const double two_over_x = 2.0 / x;
  double j_above = 0.0;
  double j_here = 1e-30;
  double norm_sum = 0.0;
  std::fill(out.begin(), out.end(), 0.0);
  const auto n = static_cast<int>(out.size());
  if (start < n) out[start] = j_here;
  for (int k = start; k >= 1; --k) {
    const double j_below = k * two_over_x * j_here - j_above;
    j_above = j_here;
    j_here = j_below;
    if (k - 1 < n) out[k - 1] = j_here;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm_sum += 2.0 * j_here;
    if (std::abs(j_here) > kRescaleThreshold) {
      j_here *= kRescaleFactor;
      j_above *= kRescaleFactor;
      norm_sum *= kRescaleFactor;
      for (int l = k - 1; l < std::min(n, start + 1); ++l) out[l] *= kRescaleFactor;
    }
  }
  norm_sum += j_here;  // J_0 term
  const double scale = 1.0 / norm_sum;
  for (double& v : out) v *= scale;
}

std::vector<double> bessel_j_sequence(int max_order, double x) {
  if (max_order < 0) throw ArgumentError("bessel_j_sequence: negative max_order");
  std::vector<double> out(static_cast<std::size_t>(max_order) + 1);
  bessel_j_sequence(x, out);
  return out;
}

double bessel_j(int order, double x) {
  const int abs_order = std::abs(order);
  if (abs_order > kBesselOrderMax) {
    throw DomainError("bessel_j: order " + std::to_string(order) + " exceeds " +
                      std::to_string(kBesselOrderMax));
  }
  check_argument(x);
  const auto values = bessel_j_sequence(abs_order, x);
  const double v = values.back();
  return (order < 0 && abs_order % 2 != 0) ? -v : v;
}

QuadratureRule gauss_jacobi_rule(int count, double radius) {
  if (count < 1) throw ArgumentError("gauss_jacobi_rule: count must be >= 1");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ArgumentError("gauss_jacobi_rule: radius must be positive and finite");
  }

  // Golub-Welsch: nodes are eigenvalues of the symmetric Jacobi matrix.
  Eigen::VectorXd diag(count);
  Eigen::VectorXd sub(std::max(count - 1, 0));
  for (int j = 0; j < count; ++j) diag[j] = jacobi01_diag(j);
  for (int j = 1; j < count; ++j) sub[j - 1] = jacobi01_offdiag(j);

  Eigen::VectorXd t(count);
  if (count == 1) {
    t[0] = diag[0];
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw NumericalError("gauss_jacobi_rule: tridiagonal eigensolver failed");
    }
    t = solver.eigenvalues();
  }

  QuadratureRule rule;
  rule.radius = radius;
  rule.nodes.resize(count);
  rule.weights.resize(count);
  const double half_radius = 0.5 * radius;
  for (int i = 0; i < count; ++i) {
    double node = t[i];
    // Newton polish on p_count.
    for (int iter = 0; iter < 3; ++iter) {
      const JacobiEval e = eval_jacobi01(count, node);
      if (e.last_derivative == 0.0) break;
      node -= e.last / e.last_derivative;
    }
    const double christoffel = 1.0 / eval_jacobi01(count, node).sum_sq;
    rule.nodes[i] = half_radius * (1.0 + node);
    rule.weights[i] = christoffel * half_radius * half_radius;
  }
  return rule;
}

RadialJacobiBasis::RadialJacobiBasis(int size, double radius) : size_(size), radius_(radius) {
  if (size < 1) throw ArgumentError("RadialJacobiBasis: size must be >= 1");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ArgumentError("RadialJacobiBasis: radius must be positive and finite");
  }
  diag_.resize(size);
  offdiag_.resize(std::max(size - 1, 0));
  for (int j = 0; j < size; ++j) diag_[j] = jacobi01_diag(j);
  for (int j = 0; j + 1 < size; ++j) offdiag_[j] = jacobi01_offdiag(j + 1);
}

void RadialJacobiBasis::eval_all(double x, std::span<double> out) const {
  if (static_cast<int>(out.size()) != size_) {
    throw ArgumentError("RadialJacobiBasis::eval_all: output size mismatch");
  }
  const double t = 2.0 * x / radius_ - 1.0;
  const double scale = 2.0 / radius_;
  double p_prev = 0.0;
  double p = 1.0 / std::sqrt(kJacobi01Mass);
  out[0] = scale * p;
  for (int j = 0; j + 1 < size_; ++j) {
    const double b_here = j > 0 ? offdiag_[j - 1] : 0.0;
    const double p_next = ((t - diag_[j]) * p - b_here * p_prev) / offdiag_[j];
    p_prev = p;
    p = p_next;
    out[j + 1] = scale * p;
  }
}

double RadialJacobiBasis::eval(int j, double x) const {
  if (j < 0 || j >= size_) {
    throw ArgumentError("RadialJacobiBasis::eval: index " + std::to_string(j) +
                        " outside basis of size " + std::to_string(size_));
  }
  const double t = 2.0 * x / radius_ - 1.0;
  double p_prev = 0.0;
  double p = 1.0 / std::sqrt(kJacobi01Mass);
  for (int i = 0; i < j; ++i) {
    const double b_here = i > 0 ? offdiag_[i - 1] : 0.0;
    const double p_next = ((t - diag_[i]) * p - b_here * p_prev) / offdiag_[i];
    p_prev = p;
    p = p_next;
  }
  return 2.0 / radius_ * p;
}

}  // namespace ftk
