#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ftk/fourier_bessel.hpp"
#include "ftk/grids.hpp"
#include "ftk/kernel_factorization.hpp"

namespace ftk {

/// Wall time of the per-image / per-template setup and of the pair loop.
struct EngineTiming {
  double precompute_seconds = 0.0;
  double pair_seconds = 0.0;
};

/// Receives the grid of one (image, template) pair. Calls are serialized.
using PairSink = std::function<void(int image, int tmpl, InnerProductGrid&& grid)>;

/// Translation order used when none is given: enough Bessel terms for
/// |delta| K with a safety margin.
int oracle_translation_order(double delta, double K);

/// Literal triple sum over radii, angular modes and translation modes.
/// L < 0 picks oracle_translation_order.
double direct_inner_product(const FourierBesselCoeffs& a, const FourierBesselCoeffs& b,
                            double delta_x, double delta_y, double gamma, int L = -1);

/// X(delta, gamma_r) for all r: translate a, correlate over q, then one
/// length-n_gamma DFT of the folded coefficients.
std::vector<double> single_shift_rotations(const FourierBesselCoeffs& a, const FourierBesselCoeffs& b,
                                           double delta_x, double delta_y, int n_gamma, int L = -1);

/// Brute force over translations: phase-shift the image samples for each
/// shift, decompose and correlate over rotations.
InnerProductGrid bft_align(const PolarFourierSamples& a, const FourierBesselCoeffs& b,
                           const TranslationGrid& tgrid, const RotationGrid& rgrid);
void bft_align_batch(std::span<const PolarFourierSamples> images,
                     std::span<const FourierBesselCoeffs> templates, const TranslationGrid& tgrid,
                     const RotationGrid& rgrid, const PairSink& sink, EngineTiming* timing = nullptr,
                     int threads = 1);

/// Factorized translation kernel with the leading H terms (H < 0: plan rank).
InnerProductGrid ftk_align(const FourierBesselCoeffs& a, const FourierBesselCoeffs& b,
                           const TranslationKernelSVD& svd, const TranslationGrid& tgrid,
                           const RotationGrid& rgrid, int H = -1);
void ftk_align_batch(std::span<const FourierBesselCoeffs> images,
                     std::span<const FourierBesselCoeffs> templates, const TranslationKernelSVD& svd,
                     const TranslationGrid& tgrid, const RotationGrid& rgrid, const PairSink& sink,
                     EngineTiming* timing = nullptr, int H = -1, int threads = 1);

/// Brute force over rotations: per angle, a 2D FFT correlation on the
/// lattice of pitch dx / pad, reported on make_translation_grid(D, dx / pad).
InnerProductGrid bfr_align(const PixelImage& a, const PixelImage& b, const RotationGrid& rgrid,
                           int pad, double D);
void bfr_align_batch(std::span<const PixelImage> images, std::span<const PixelImage> templates,
                     const RotationGrid& rgrid, int pad, double D, const PairSink& sink,
                     EngineTiming* timing = nullptr, int threads = 1);

struct Alignment {
  int shift = 0;
  int rotation = 0;
  double value = 0.0;
};

/// Largest value; ties go to the smallest (shift, rotation).
Alignment argmax_alignment(const InnerProductGrid& grid);

}  // namespace ftk
