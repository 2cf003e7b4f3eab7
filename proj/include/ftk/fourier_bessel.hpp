#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ftk/fft.hpp"
#include "ftk/special_functions.hpp"

namespace ftk {

/// n x n real samples on [-1, 1]^2. samples[i * n + j] sits at
/// (i * dx - 1, j * dx - 1) with dx = 2 / n, so index (n/2, n/2) is the origin.
struct PixelImage {
  int n = 0;
  std::vector<double> samples;

  PixelImage() = default;
  explicit PixelImage(int size);

  [[nodiscard]] double dx() const { return 2.0 / n; }
  [[nodiscard]] double coord(int i) const { return i * dx() - 1.0; }
  double& at(int i, int j) { return samples[static_cast<std::size_t>(i) * n + j]; }
  [[nodiscard]] double at(int i, int j) const { return samples[static_cast<std::size_t>(i) * n + j]; }

  /// L2 norm under the pixel-sum rule dx^2 sum A^2.
  [[nodiscard]] double norm() const;
  /// Throws ArgumentError unless n >= 4, n even, size matches and all finite.
  void validate() const;
};

/// Rotate by gamma about the origin, then shift by (shift_x, shift_y).
struct RigidTransform {
  double shift_x = 0.0;
  double shift_y = 0.0;
  double gamma = 0.0;

  [[nodiscard]] double shift_norm() const;
  [[nodiscard]] double shift_angle() const;
};

double nyquist_frequency(int n);                  // K = pi n / 2
double shift_radius(int n, double W);             // D = 2 dx W
double shift_wavelengths(double D, double K);     // W = D K / 2 pi
int default_angular_order(double K);              // Q
int default_translation_order(double W);          // L
int default_radial_count(int n);                  // M

using RulePtr = std::shared_ptr<const QuadratureRule>;

/// Fourier transform samples on the tensor polar grid (k_m, psi_p),
/// psi_p = pi p / Q for p = 0..2Q-1. values is M x 2Q.
struct PolarFourierSamples {
  double K = 0.0;
  int Q = 0;
  RulePtr rule;
  Eigen::MatrixXcd values;

  [[nodiscard]] int radial_count() const { return static_cast<int>(values.rows()); }
  [[nodiscard]] int angle_count() const { return static_cast<int>(values.cols()); }
  [[nodiscard]] double angle(int p) const;
};

/// Angular Fourier coefficients a(k_m; q) for |q| <= Q. values is
/// M x (2Q + 1) with column q + Q.
struct FourierBesselCoeffs {
  double K = 0.0;
  int Q = 0;
  RulePtr rule;
  Eigen::MatrixXcd values;

  [[nodiscard]] int radial_count() const { return static_cast<int>(values.rows()); }
  [[nodiscard]] int column(int q) const { return q + Q; }
  [[nodiscard]] cdouble coeff(int m, int q) const { return values(m, q + Q); }
};

/// Pixel-sum Fourier transform dx^2 sum_ij A_ij exp(-i k.x_ij) at arbitrary
/// frequencies, by separable dense summation.
std::vector<cdouble> fourier_transform_at(const PixelImage& image, std::span<const double> kx,
                                          std::span<const double> ky);

/// Polar samples on a Gauss-Jacobi radial rule over [0, K]. The direct sum
/// is exact to rounding, so tol only gates its admissible range.
PolarFourierSamples polar_fourier(const PixelImage& image, const RulePtr& rule, int Q,
                                  double tol = 1e-12);
PolarFourierSamples polar_fourier(const PixelImage& image, double K, int M, int Q,
                                  double tol = 1e-12);

/// Length-2Q DFT per ring. The aliased +-Q value is split evenly between
/// the two end columns so that synthesis reproduces the samples.
FourierBesselCoeffs fb_decompose(const PolarFourierSamples& samples);

/// Inverse of fb_decompose.
PolarFourierSamples fb_synthesize(const FourierBesselCoeffs& coeffs);

/// a'(k; q) = exp(-i q gamma) a(k; q).
FourierBesselCoeffs rotate_coeffs(const FourierBesselCoeffs& c, double gamma);

/// J_l(|delta| k) exp(-i l (omega + pi/2)).
cdouble translation_kernel(double delta_x, double delta_y, double k, int ell);

/// a'(k; q) = sum_{|l| <= L} f(delta, k; l) a(k; q - l), zero outside |q| <= Q.
FourierBesselCoeffs translate_coeffs(const FourierBesselCoeffs& c, double delta_x,
                                     double delta_y, int L);

/// Multiplies samples by exp(-i k . delta) in place.
void apply_translation_phase(PolarFourierSamples& samples, double delta_x, double delta_y);

struct BlobOptions {
  int count = 5;
  double anisotropy_min = 1.0;
  double anisotropy_max = 1.5;
  bool centered = false;
};

/// Sum of positive anisotropic Gaussians, normalized to unit pixel-sum L2 norm.
PixelImage gen_gaussian_blobs(std::uint64_t seed, int n, const BlobOptions& options = {});

/// Rotation by exact polar angle shift, translation by phase, resampled to
/// pixels with a bandlimited inverse transform over |k| <= K.
PixelImage transform_image(const PixelImage& image, const RigidTransform& t);

}  // namespace ftk
