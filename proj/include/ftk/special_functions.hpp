#pragma once

#include <span>
#include <vector>

namespace ftk {

inline constexpr int kBesselOrderMax = 512;
inline constexpr double kBesselArgMax = 4096.0;

/// Bessel function of the first kind J_order(x) for integer order and x >= 0.
/// Negative orders use J_{-l} = (-1)^l J_l. Throws DomainError when
/// |order| > kBesselOrderMax or x is outside [0, kBesselArgMax].
double bessel_j(int order, double x);

/// Fills out[l] = J_l(x) for l = 0..out.size()-1 with a single normalized
/// Miller recurrence. No order limit; x must lie in [0, kBesselArgMax].
void bessel_j_sequence(double x, std::span<double> out);

/// Convenience overload returning J_0..J_max_order.
std::vector<double> bessel_j_sequence(int max_order, double x);

/// Nodes and weights integrating g(k) k dk over [0, radius].
struct QuadratureRule {
  double radius = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;

  [[nodiscard]] int size() const { return static_cast<int>(nodes.size()); }
};

/// M-point Gauss-Jacobi rule (alpha = 0, beta = 1) mapped to [0, radius].
/// Exact for polynomials of degree <= 2M-1 against the weight k dk.
QuadratureRule gauss_jacobi_rule(int count, double radius);

/// Polynomials orthonormal on [0, radius] under the weight x dx,
/// evaluated by their three-term recurrence.
class RadialJacobiBasis {
 public:
  RadialJacobiBasis(int size, double radius);

  [[nodiscard]] int size() const { return size_; }
  [[nodiscard]] double radius() const { return radius_; }

  /// Value of basis element j at x in [0, radius].
  [[nodiscard]] double eval(int j, double x) const;

  /// All basis values at x; out.size() must equal size().
  void eval_all(double x, std::span<double> out) const;

  /// Recurrence coefficients of the underlying orthonormal family on [-1, 1]
  /// with weight (1 + t): t p_j = b_{j+1} p_{j+1} + a_j p_j + b_j p_{j-1}.
  [[nodiscard]] const std::vector<double>& diagonal() const { return diag_; }
  [[nodiscard]] const std::vector<double>& off_diagonal() const { return offdiag_; }

 private:
  int size_;
  double radius_;
  std::vector<double> diag_;
  std::vector<double> offdiag_;  // offdiag_[j] = b_{j+1}
};

}  // namespace ftk
