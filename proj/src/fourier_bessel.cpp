#include "ftk/fourier_bessel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "ftk/errors.hpp"

namespace ftk {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kChunk = 1024;

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixXcd = Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMatrixXd> as_matrix(const PixelImage& image) {
  return {image.samples.data(), image.n, image.n};
}

// Bandlimited resampling: A(x) = (2 pi)^-2 sum_pt weight_pt value_pt exp(i k_pt . x).
PixelImage synthesize_pixels(int n, std::span<const double> kx, std::span<const double> ky,
                             std::span<const cdouble> weighted) {
  PixelImage out(n);
  const double dx = out.dx();
  const auto total = static_cast<int>(kx.size());
  Eigen::MatrixXd cx(kChunk, n), sx(kChunk, n), cy(kChunk, n), sy(kChunk, n);
  RowMatrixXd acc = RowMatrixXd::Zero(n, n);
  for (int start = 0; start < total; start += kChunk) {
    const int count = std::min(kChunk, total - start);
    for (int c = 0; c < count; ++c) {
      const int pt = start + c;
      const double vr = weighted[pt].real();
      const double vi = weighted[pt].imag();
      for (int i = 0; i < n; ++i) {
        const double x = i * dx - 1.0;
        const double ax = kx[pt] * x;
        const double ay = ky[pt] * x;
        // (vr + i vi) e^{i ax} split into real/imag rows.
        const double c_ax = std::cos(ax), s_ax = std::sin(ax);
        cx(c, i) = vr * c_ax - vi * s_ax;
        sx(c, i) = vr * s_ax + vi * c_ax;
        cy(c, i) = std::cos(ay);
        sy(c, i) = std::sin(ay);
      }
    }
    // Re[(cx + i sx)(cy + i sy)] = cx cy - sx sy
    acc.noalias() += cx.topRows(count).transpose() * cy.topRows(count);
    acc.noalias() -= sx.topRows(count).transpose() * sy.topRows(count);
  }
  const double scale = 1.0 / (4.0 * kPi * kPi);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.at(i, j) = scale * acc(i, j);
  return out;
}

}  // namespace

PixelImage::PixelImage(int size) : n(size) {
  if (size < 4 || size % 2 != 0) {
    throw ArgumentError("PixelImage: n must be even and >= 4, got " + std::to_string(size));
  }
  samples.assign(static_cast<std::size_t>(size) * size, 0.0);
}

double PixelImage::norm() const {
  double s = 0.0;
  for (double v : samples) s += v * v;
  return dx() * std::sqrt(s);
}

void PixelImage::validate() const {
  if (n < 4 || n % 2 != 0) throw ArgumentError("PixelImage: n must be even and >= 4");
  if (samples.size() != static_cast<std::size_t>(n) * n) {
    throw ArgumentError("PixelImage: sample count does not match n*n");
  }
  for (double v : samples)
    if (!std::isfinite(v)) throw ArgumentError("PixelImage: non-finite sample");
}

double RigidTransform::shift_norm() const { return std::hypot(shift_x, shift_y); }
double RigidTransform::shift_angle() const { return std::atan2(shift_y, shift_x); }

double nyquist_frequency(int n) { return kPi * n / 2.0; }
double shift_radius(int n, double W) { return 2.0 * (2.0 / n) * W; }
double shift_wavelengths(double D, double K) { return D * K / (2.0 * kPi); }

int default_angular_order(double K) {
  return static_cast<int>(std::ceil(K + 8.0 * std::cbrt(K)));
}

int default_translation_order(double W) {
  const double z = 2.0 * kPi * W;
  return static_cast<int>(std::ceil(z + 8.0 * std::cbrt(z)));
}

int default_radial_count(int n) { return n; }

double PolarFourierSamples::angle(int p) const { return kPi * p / Q; }

std::vector<cdouble> fourier_transform_at(const PixelImage& image, std::span<const double> kx,
                                          std::span<const double> ky) {
  image.validate();
  if (kx.size() != ky.size()) throw ArgumentError("fourier_transform_at: kx/ky size mismatch");
  const int n = image.n;
  const double dx = image.dx();
  const auto a = as_matrix(image);
  const auto total = static_cast<int>(kx.size());
  std::vector<cdouble> out(kx.size());

  Eigen::MatrixXd cy(n, kChunk), sy(n, kChunk), tc(n, kChunk), ts(n, kChunk);
  for (int start = 0; start < total; start += kChunk) {
    const int count = std::min(kChunk, total - start);
    for (int c = 0; c < count; ++c) {
      for (int j = 0; j < n; ++j) {
        const double phase = ky[start + c] * (j * dx - 1.0);
        cy(j, c) = std::cos(phase);
        sy(j, c) = std::sin(phase);
      }
    }
    tc.leftCols(count).noalias() = a * cy.leftCols(count);
    ts.leftCols(count).noalias() = a * sy.leftCols(count);
    for (int c = 0; c < count; ++c) {
      double re = 0.0, im = 0.0;
      const double k = kx[start + c];
      for (int i = 0; i < n; ++i) {
        const double phase = k * (i * dx - 1.0);
        const double cx = std::cos(phase), sx = std::sin(phase);
        // (cx - i sx)(tc - i ts)
        re += cx * tc(i, c) - sx * ts(i, c);
        im -= sx * tc(i, c) + cx * ts(i, c);
      }
      out[start + c] = dx * dx * cdouble(re, im);
    }
  }
  return out;
}

PolarFourierSamples polar_fourier(const PixelImage& image, const RulePtr& rule, int Q,
                                  double tol) {
  if (!rule) throw ArgumentError("polar_fourier: missing radial rule");
  if (Q < 1) throw ArgumentError("polar_fourier: Q must be >= 1");
  if (!(tol >= 1e-14 && tol <= 1e-4)) throw ArgumentError("polar_fourier: tol outside [1e-14, 1e-4]");
  image.validate();
  const double K = rule->radius;
  if (K > kPi / image.dx() * (1.0 + 1e-12)) {
    throw DomainError("polar_fourier: K exceeds the Nyquist frequency pi/dx");
  }
  const int M = rule->size();
  // Half the angles suffice: A real gives A(k, psi + pi) = conj A(k, psi).
  std::vector<double> kx, ky;
  kx.reserve(static_cast<std::size_t>(M) * Q);
  ky.reserve(static_cast<std::size_t>(M) * Q);
  for (int p = 0; p < Q; ++p) {
    const double psi = kPi * p / Q;
    for (int m = 0; m < M; ++m) {
      kx.push_back(rule->nodes[m] * std::cos(psi));
      ky.push_back(rule->nodes[m] * std::sin(psi));
    }
  }
  const auto half = fourier_transform_at(image, kx, ky);

  PolarFourierSamples out;
  out.K = K;
  out.Q = Q;
  out.rule = rule;
  out.values.resize(M, 2 * Q);
  for (int p = 0; p < Q; ++p) {
    for (int m = 0; m < M; ++m) {
      const cdouble v = half[static_cast<std::size_t>(p) * M + m];
      out.values(m, p) = v;
      out.values(m, p + Q) = std::conj(v);
    }
  }
  return out;
}

PolarFourierSamples polar_fourier(const PixelImage& image, double K, int M, int Q, double tol) {
  return polar_fourier(image, std::make_shared<const QuadratureRule>(gauss_jacobi_rule(M, K)), Q,
                       tol);
}

FourierBesselCoeffs fb_decompose(const PolarFourierSamples& samples) {
  const int M = samples.radial_count();
  const int Q = samples.Q;
  const int n = 2 * Q;
  if (samples.angle_count() != n || Q < 1) {
    throw ArgumentError("fb_decompose: expected 2Q equispaced angles");
  }
  RowMatrixXcd buf = samples.values;
  cached_fft_plan(n, FftDirection::Forward, M).execute(buf.data(), buf.data());

  FourierBesselCoeffs out;
  out.K = samples.K;
  out.Q = Q;
  out.rule = samples.rule;
  out.values.resize(M, n + 1);
  const double scale = 1.0 / n;
  for (int q = -Q + 1; q < Q; ++q) {
    const int src = q < 0 ? q + n : q;
    out.values.col(q + Q) = buf.col(src) * scale;
  }
  out.values.col(0) = buf.col(Q) * (0.5 * scale);
  out.values.col(n) = out.values.col(0);
  return out;
}

PolarFourierSamples fb_synthesize(const FourierBesselCoeffs& coeffs) {
  const int M = coeffs.radial_count();
  const int Q = coeffs.Q;
  const int n = 2 * Q;
  if (coeffs.values.cols() != n + 1) throw ArgumentError("fb_synthesize: malformed coefficients");
  RowMatrixXcd buf(M, n);
  for (int q = -Q + 1; q < Q; ++q) buf.col(q < 0 ? q + n : q) = coeffs.values.col(q + Q);
  buf.col(Q) = coeffs.values.col(0) + coeffs.values.col(n);
  cached_fft_plan(n, FftDirection::Backward, M).execute(buf.data(), buf.data());

  PolarFourierSamples out;
  out.K = coeffs.K;
  out.Q = Q;
  out.rule = coeffs.rule;
  out.values = buf;
  return out;
}

FourierBesselCoeffs rotate_coeffs(const FourierBesselCoeffs& c, double gamma) {
  FourierBesselCoeffs out = c;
  for (int q = -c.Q; q <= c.Q; ++q) out.values.col(q + c.Q) *= std::polar(1.0, -q * gamma);
  return out;
}

cdouble translation_kernel(double delta_x, double delta_y, double k, int ell) {
  const double delta = std::hypot(delta_x, delta_y);
  const double omega = std::atan2(delta_y, delta_x);
  return bessel_j(ell, delta * k) * std::polar(1.0, -ell * (omega + kPi / 2.0));
}

FourierBesselCoeffs translate_coeffs(const FourierBesselCoeffs& c, double delta_x,
                                     double delta_y, int L) {
  if (L < 0) throw ArgumentError("translate_coeffs: L must be >= 0");
  const int M = c.radial_count();
  const int Q = c.Q;
  const double delta = std::hypot(delta_x, delta_y);
  const double omega = std::atan2(delta_y, delta_x);

  std::vector<cdouble> phase(2 * L + 1);
  for (int ell = -L; ell <= L; ++ell) phase[ell + L] = std::polar(1.0, -ell * (omega + kPi / 2.0));

  FourierBesselCoeffs out = c;
  out.values.setZero();
  std::vector<double> bessel(L + 1);
  std::vector<cdouble> kernel(2 * L + 1);
  for (int m = 0; m < M; ++m) {
    bessel_j_sequence(delta * c.rule->nodes[m], bessel);
    for (int ell = -L; ell <= L; ++ell) {
      const int a = std::abs(ell);
      const double j = (ell < 0 && a % 2 != 0) ? -bessel[a] : bessel[a];
      kernel[ell + L] = j * phase[ell + L];
    }
    for (int q = -Q; q <= Q; ++q) {
      cdouble acc = 0.0;
      const int lo = std::max(-L, q - Q);
      const int hi = std::min(L, q + Q);
      for (int ell = lo; ell <= hi; ++ell) acc += kernel[ell + L] * c.values(m, q - ell + Q);
      out.values(m, q + Q) = acc;
    }
  }
  return out;
}

void apply_translation_phase(PolarFourierSamples& samples, double delta_x, double delta_y) {
  const int M = samples.radial_count();
  for (int p = 0; p < samples.angle_count(); ++p) {
    const double psi = samples.angle(p);
    const double proj = delta_x * std::cos(psi) + delta_y * std::sin(psi);
    for (int m = 0; m < M; ++m) samples.values(m, p) *= std::polar(1.0, -samples.rule->nodes[m] * proj);
  }
}

PixelImage gen_gaussian_blobs(std::uint64_t seed, int n, const BlobOptions& options) {
  if (options.count < 1) throw ArgumentError("gen_gaussian_blobs: blob count must be >= 1");
  if (!(options.anisotropy_min >= 1.0 && options.anisotropy_max >= options.anisotropy_min)) {
    throw ArgumentError("gen_gaussian_blobs: anisotropy range must satisfy 1 <= min <= max");
  }
  PixelImage image(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double sigma_floor = std::max(0.06, 7.0 / nyquist_frequency(n));
  for (int b = 0; b < options.count; ++b) {
    const double amplitude = 0.5 + 0.5 * unit(rng);
    const double sigma_minor = sigma_floor * (1.0 + 0.4 * unit(rng));
    const double ratio =
        options.anisotropy_min + (options.anisotropy_max - options.anisotropy_min) * unit(rng);
    const double sigma_major = sigma_minor * ratio;
    const double theta = kPi * unit(rng);
    double cx = 0.0, cy = 0.0;
    if (!options.centered) {
      const double reach = std::max(0.0, 0.75 - 4.0 * sigma_major);
      do {
        cx = reach * (2.0 * unit(rng) - 1.0);
        cy = reach * (2.0 * unit(rng) - 1.0);
      } while (cx * cx + cy * cy > reach * reach);
    }
    const double ct = std::cos(theta), st = std::sin(theta);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double x = image.coord(i) - cx;
        const double y = image.coord(j) - cy;
        const double u = ct * x + st * y;
        const double v = -st * x + ct * y;
        image.at(i, j) += amplitude * std::exp(-0.5 * (u * u / (sigma_major * sigma_major) +
                                                        v * v / (sigma_minor * sigma_minor)));
      }
    }
  }
  const double norm = image.norm();
  for (double& v : image.samples) v /= norm;
  return image;
}

PixelImage transform_image(const PixelImage& image, const RigidTransform& t) {
  image.validate();
  const int n = image.n;
  const double K = nyquist_frequency(n);
  const int M = n + n / 2;
  const int Q = default_angular_order(2.0 * K);
  const auto rule = gauss_jacobi_rule(M, K);

  const auto total = static_cast<std::size_t>(M) * 2 * Q;
  std::vector<double> kx(total), ky(total), rx(total), ry(total);
  for (int p = 0; p < 2 * Q; ++p) {
    const double psi = kPi * p / Q;
    for (int m = 0; m < M; ++m) {
      const std::size_t pt = static_cast<std::size_t>(p) * M + m;
      kx[pt] = rule.nodes[m] * std::cos(psi);
      ky[pt] = rule.nodes[m] * std::sin(psi);
      // Rotating the image by gamma rotates its transform by gamma.
      rx[pt] = rule.nodes[m] * std::cos(psi - t.gamma);
      ry[pt] = rule.nodes[m] * std::sin(psi - t.gamma);
    }
  }
  auto values = fourier_transform_at(image, rx, ry);
  const double dpsi = kPi / Q;
  for (int p = 0; p < 2 * Q; ++p) {
    for (int m = 0; m < M; ++m) {
      const std::size_t pt = static_cast<std::size_t>(p) * M + m;
      const double phase = -(kx[pt] * t.shift_x + ky[pt] * t.shift_y);
      values[pt] *= rule.weights[m] * dpsi * std::polar(1.0, phase);
    }
  }
  return synthesize_pixels(n, kx, ky, values);
}

}  // namespace ftk
