#pragma once

// Independent reference computations used only by tests.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "ftk/fourier_bessel.hpp"

namespace oracle {

using cdouble = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// J_n(z) = (1/2pi) int_0^{2pi} cos(n t - z sin t) dt by the periodic
// trapezoid rule, spectrally exact once the point count exceeds n + z.
inline double bessel_integral(int n, double z) {
  const int points = 2 * static_cast<int>(z + std::abs(n)) + 64;
  double s = 0.0;
  for (int k = 0; k < points; ++k) {
    const double t = 2.0 * kPi * k / points;
    s += std::cos(n * t - z * std::sin(t));
  }
  return s / points;
}

// Literal double loop over pixels.
inline cdouble dense_fourier(const ftk::PixelImage& a, double kx, double ky) {
  cdouble s = 0.0;
  const double dx = a.dx();
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j)
      s += a.at(i, j) * std::polar(1.0, -(kx * a.coord(i) + ky * a.coord(j)));
  return dx * dx * s;
}

// a(k; q) as the real-space projection of the image onto the
// Fourier-Bessel function (-i)^q J_q(k r) exp(-i q theta).
inline cdouble fourier_bessel_projection(const ftk::PixelImage& a, double k, int q) {
  cdouble s = 0.0;
  const double dx = a.dx();
  for (int i = 0; i < a.n; ++i) {
    for (int j = 0; j < a.n; ++j) {
      const double v = a.at(i, j);
      if (v == 0.0) continue;
      const double x = a.coord(i), y = a.coord(j);
      const double r = std::hypot(x, y);
      const double theta = std::atan2(y, x);
      s += v * bessel_integral(q, k * r) * std::polar(1.0, -q * (theta + kPi / 2.0));
    }
  }
  return dx * dx * s;
}

// Pixel-sum transform of exp(-x^2 / 2 sigma^2) on the n-point lattice over
// [-1, 1): analytic infinite-lattice value minus the explicit lattice tails.
inline cdouble truncated_gaussian_1d(int n, double sigma, double k) {
  const double dx = 2.0 / n;
  cdouble v = sigma * std::sqrt(2.0 * kPi) * std::exp(-0.5 * sigma * sigma * k * k);
  for (int i = 1; i < 4 * n; ++i) {
    const double lo = -1.0 - i * dx;
    const double hi = 1.0 + (i - 1) * dx;
    v -= dx * std::exp(-lo * lo / (2 * sigma * sigma)) * std::polar(1.0, -k * lo);
    v -= dx * std::exp(-hi * hi / (2 * sigma * sigma)) * std::polar(1.0, -k * hi);
  }
  return v;
}

inline ftk::PixelImage centered_gaussian(int n, double sigma) {
  ftk::PixelImage a(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double r2 = a.coord(i) * a.coord(i) + a.coord(j) * a.coord(j);
      a.at(i, j) = std::exp(-r2 / (2 * sigma * sigma));
    }
  return a;
}

}  // namespace oracle
