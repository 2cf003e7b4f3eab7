#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "ftk/alignment_engines.hpp"

namespace ftk {

// ---------------------------------------------------------------- bilinear

/// Corners of every lattice cell (pitch h) that meets the disk of radius D.
/// Some nodes lie just outside the disk.
TranslationGrid bilinear_nodes(double D, double h);

struct BilinearStencil {
  std::array<int, 4> node{};
  std::array<double, 4> weight{};
};

/// Stencils into a grid produced by bilinear_nodes(D, h).
std::vector<BilinearStencil> bilinear_stencils(const TranslationGrid& nodes, double h,
                                               const TranslationGrid& queries);

/// Exact X at the nodes (BFT), then bilinear interpolation in the shift.
InnerProductGrid linear_interp_align(const PolarFourierSamples& a, const FourierBesselCoeffs& b, double h,
                                     const TranslationGrid& tgrid, const RotationGrid& rgrid);

/// int_{|k| <= K} exp(i k . r) d^2k = 2 pi K J1(K r) / r.
double disk_kernel(double r, double K);

/// || F(delta, .) - sum_z w_z F(delta_z, .) ||_{L2(|k| <= K)} for real weights.
double plane_wave_residual(const TranslationGrid& nodes, std::span<const int> idx, std::span<const double> w,
                           double qx, double qy, double K);

/// Hilbert-Schmidt error of bilinear interpolation of exp(-i k . delta) over
/// the shift disk and the frequency disk.
double bilinear_hs_error(double D, double h, double K);

/// Pitch whose node set is closest in size to count.
double bilinear_pitch_for_nodes(double D, int count);

/// Fewest nodes (over the pitch) with bilinear_hs_error <= target; the pitch
/// is returned through pitch.
int bilinear_nodes_for_error(double D, double K, double target, double* pitch = nullptr);

// ---------------------------------------------------------------- least squares

enum class LsKernelPath { Published, Graf, Quadrature };

const char* ls_path_name(LsKernelPath path);

/// J0(K r) + J1(K r).
double ls_kernel_published(double r, double K);
/// int_0^K J0(k r) k dk = K^2 J1(K r) / (K r).
double ls_kernel_graf(double r, double K);
/// d/dr of ls_kernel_graf.
double ls_kernel_graf_derivative(double r, double K);
/// sum_{|l| <= L} exp(i l (w' - w)) int_0^K J_l(|d'| k) J_l(|d| k) k dk, real part.
double ls_kernel_quadrature(double x1, double y1, double x2, double y2, double K, int L = -1);

struct LsKernelCheck {
  LsKernelPath path = LsKernelPath::Quadrature;
  double scale = 1.0;             // oracle ~ scale * chosen form
  double published_misfit = 0.0;  // max |oracle - c f| / max |oracle| after the best c
  double graf_misfit = 0.0;
};

/// Compares both closed forms with the quadrature oracle on node pairs and
/// picks the first that is proportional within tol.
LsKernelCheck validate_ls_kernel(const TranslationGrid& nodes, double K, double tol = 1e-6);

struct LsWeights {
  Eigen::VectorXd weights;
  LsKernelPath path = LsKernelPath::Graf;
  double condition = 1.0;
};

/// Normal equations M Y = g with M_ab = kernel(|d_a - d_b|), g_a = kernel(|d_a - d|).
/// Throws ArgumentError for repeated nodes and NumericalError when the
/// condition number exceeds 1e12.
LsWeights ls_weights(const TranslationGrid& nodes, double qx, double qy, double K);
LsWeights ls_weights(const TranslationGrid& nodes, double qx, double qy, double K, const LsKernelCheck& check);

/// Mean LS residual energy over a fixed quadrature of the shift disk, in
/// units of int |.|^2 d^2k.
struct LsObjective {
  double D = 0.0;
  double K = 0.0;
  std::vector<double> sx, sy, sw;  // samples and weights summing to 1

  LsObjective(double D, double K, int radial = 8, int angular = 16);
  double value(const TranslationGrid& nodes) const;
  double value_and_gradient(const TranslationGrid& nodes, Eigen::VectorXd* grad) const;  // grad: (x0,y0,x1,...)
};

struct DescentResult {
  TranslationGrid nodes;
  std::vector<double> history;  // objective after each accepted step, starting with the initial value
};

/// Projected gradient descent keeping nodes in the disk; rejected steps halve the rate.
DescentResult ls_node_descent(const TranslationGrid& initial, double K, double D, int steps, double rate);

// ---------------------------------------------------------------- generalized least squares

/// int_0^K J_l(a k) J_l(b k) k dk by Gauss-Jacobi quadrature.
double bessel_product_integral(int ell, double a, double b, double K);

/// Per-mode weights Y_z = exp(-i l (w - w_z)) U_z, U solving the radial
/// normal equations on the distinct node radii (shared equally within a radius).
std::vector<cdouble> gls_weights(const TranslationGrid& nodes, double qx, double qy, int ell, double K);

/// sum_{|l| <= L} 2 pi int_0^K |f(d,k;l) - sum_z Y_z(l) f(d_z,k;l)|^2 k dk.
double modal_residual(const TranslationGrid& nodes, double qx, double qy, double K, int L,
                      const std::function<std::vector<cdouble>(int)>& weights);

// ---------------------------------------------------------------- error profiles

/// ||F(delta, .) - F_H(delta, .)|| over the frequency disk for the leading H terms.
double ftk_shift_error(const TranslationKernelSVD& svd, int H, double delta);

/// Same quantity for bilinear interpolation at pitch h, shift (x, y).
double bilinear_shift_error(double D, double h, double K, double x, double y);

}  // namespace ftk
