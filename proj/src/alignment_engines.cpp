#include "ftk/alignment_engines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "ftk/errors.hpp"
#include "parallel.hpp"

namespace ftk {
namespace {

constexpr double kPi = std::numbers::pi;
using Clock = std::chrono::steady_clock;
using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Per-worker busy time, rescaled to wall time when reported.
class TimeSplit {
 public:
  void add(double pre, double pair) {
    std::lock_guard<std::mutex> lock(m_);
    pre_ += pre;
    pair_ += pair;
  }
  void report(EngineTiming* timing, double wall, double serial_pre) const {
    if (!timing) return;
    const double busy = pre_ + pair_;
    const double scale = busy > 0.0 ? std::max(wall - serial_pre, 0.0) / busy : 0.0;
    timing->precompute_seconds = serial_pre + pre_ * scale;
    timing->pair_seconds = pair_ * scale;
  }

 private:
  std::mutex m_;
  double pre_ = 0.0;
  double pair_ = 0.0;
};

int fold_index(int q, int ng) { return ((q % ng) + ng) % ng; }

void check_same_layout(const FourierBesselCoeffs& a, const FourierBesselCoeffs& b, const char* who) {
  if (!a.rule || !b.rule) throw ArgumentError(std::string(who) + ": coefficients without a radial rule");
  if (a.Q != b.Q || a.radial_count() != b.radial_count() || a.values.cols() != 2 * a.Q + 1 ||
      b.values.cols() != 2 * b.Q + 1) {
    throw ArgumentError(std::string(who) + ": image and template coefficients differ in shape");
  }
  if (a.rule != b.rule && a.rule->nodes != b.rule->nodes) {
    throw ArgumentError(std::string(who) + ": image and template use different radial rules");
  }
}

// b scaled by 2 pi w_m (not conjugated; Eigen's dot conjugates the left factor).
Eigen::MatrixXcd weighted_template(const FourierBesselCoeffs& b) {
  Eigen::MatrixXcd out = b.values;
  for (int m = 0; m < b.radial_count(); ++m) out.row(m) *= 2.0 * kPi * b.rule->weights[m];
  return out;
}

// out[fold(q)] += sum_m conj(bw(m,q)) a(m,q).
void correlate_modes(const Eigen::MatrixXcd& bw, const Eigen::MatrixXcd& a, int Q, int ng, cdouble* out) {
  for (int q = -Q; q <= Q; ++q) out[fold_index(q, ng)] += bw.col(q + Q).dot(a.col(q + Q));
}

void finish_imag(InnerProductGrid& g, double max_imag) {
  const double peak = g.values.cwiseAbs().maxCoeff();
  g.imag_residual = peak > 0.0 ? max_imag / peak : max_imag;
}

}  // namespace

int oracle_translation_order(double delta, double K) {
  const double z = delta * K;
  return static_cast<int>(std::ceil(z + 8.0 * std::cbrt(z))) + 16;
}

double direct_inner_product(const FourierBesselCoeffs& a, const FourierBesselCoeffs& b,
                            double delta_x, double delta_y, double gamma, int L) {
  check_same_layout(a, b, "direct_inner_product");
  const int M = a.radial_count();
  const int Q = a.Q;
  const double delta = std::hypot(delta_x, delta_y);
  const double omega = std::atan2(delta_y, delta_x);
  if (L < 0) L = oracle_translation_order(delta, a.K);

  std::vector<cdouble> phase(2 * L + 1), rot(2 * Q + 1);
  for (int ell = -L; ell <= L; ++ell) phase[ell + L] = std::polar(1.0, -ell * (omega + kPi / 2.0));
  for (int q = -Q; q <= Q; ++q) rot[q + Q] = std::polar(1.0, -q * gamma);
  std::vector<double> j(L + 1);
  cdouble total = 0.0;
  for (int m = 0; m < M; ++m) {
    bessel_j_sequence(delta * a.rule->nodes[m], j);
    cdouble ring = 0.0;
    for (int q = -Q; q <= Q; ++q) {
      cdouble shifted = 0.0;
      for (int ell = std::max(-L, q - Q); ell <= std::min(L, q + Q); ++ell) {
        const int e = std::abs(ell);
        const double jl = (ell < 0 && e % 2 != 0) ? -j[e] : j[e];
        shifted += jl * phase[ell + L] * a.values(m, q - ell + Q);
      }
      ring += rot[q + Q] * std::conj(b.values(m, q + Q)) * shifted;
    }
    total += a.rule->weights[m] * ring;
  }
  return 2.0 * kPi * total.real();
}

std::vector<double> single_shift_rotations(const FourierBesselCoeffs& a, const FourierBesselCoeffs& b,
                                           double delta_x, double delta_y, int n_gamma, int L) {
  check_same_layout(a, b, "single_shift_rotations");
  if (n_gamma < 1) throw ArgumentError("single_shift_rotations: n_gamma must be >= 1");
  if (L < 0) L = oracle_translation_order(std::hypot(delta_x, delta_y), a.K);
  const auto shifted = translate_coeffs(a, delta_x, delta_y, L);
  std::vector<cdouble> buf(n_gamma, 0.0);
  correlate_modes(weighted_template(b), shifted.values, a.Q, n_gamma, buf.data());
  cached_fft_plan(n_gamma, FftDirection::Forward).execute(buf.data(), buf.data());
  std::vector<double> out(n_gamma);
  for (int r = 0; r < n_gamma; ++r) out[r] = buf[r].real();
  return out;
}

// ---------------------------------------------------------------- BFT

void bft_align_batch(std::span<const PolarFourierSamples> images,
                     std::span<const FourierBesselCoeffs> templates, const TranslationGrid& tgrid,
                     const RotationGrid& rgrid, const PairSink& sink, EngineTiming* timing, int threads) {
  if (images.empty() || templates.empty()) return;
  const auto wall0 = Clock::now();
  const int T = static_cast<int>(templates.size());
  const int N = tgrid.size();
  const int ng = rgrid.count;
  const int Q = templates[0].Q;
  for (const auto& im : images) {
    if (im.Q != Q || im.radial_count() != templates[0].radial_count() || im.angle_count() != 2 * Q) {
      throw ArgumentError("bft_align: image samples do not match the template coefficients");
    }
  }
  std::vector<Eigen::MatrixXcd> bw;
  for (const auto& b : templates) {
    if (b.Q != Q) throw ArgumentError("bft_align: templates differ in Q");
    bw.push_back(weighted_template(b));
  }
  const double serial_pre = seconds_since(wall0);

  TimeSplit split;
  std::mutex sink_mutex;
  detail::parallel_for(static_cast<int>(images.size()), threads, [&](int i) {
    double pre = 0.0, pair = 0.0;
    std::vector<InnerProductGrid> grids(T);
    std::vector<double> max_imag(T, 0.0);
    for (auto& g : grids) {
      g.engine = "bft";
      g.values.resize(N, ng);
    }
    std::vector<cdouble> buf(static_cast<std::size_t>(T) * ng);
    const FftPlan& plan = cached_fft_plan(ng, FftDirection::Forward, T);
    for (int j = 0; j < N; ++j) {
      auto t0 = Clock::now();
      PolarFourierSamples s = images[i];
      apply_translation_phase(s, tgrid.x[j], tgrid.y[j]);
      const FourierBesselCoeffs c = fb_decompose(s);
      pre += seconds_since(t0);

      t0 = Clock::now();
      std::fill(buf.begin(), buf.end(), cdouble(0.0));
      for (int t = 0; t < T; ++t) correlate_modes(bw[t], c.values, Q, ng, buf.data() + static_cast<std::size_t>(t) * ng);
      plan.execute(buf.data(), buf.data());
      for (int t = 0; t < T; ++t)
        for (int r = 0; r < ng; ++r) {
          const cdouble v = buf[static_cast<std::size_t>(t) * ng + r];
          grids[t].values(j, r) = v.real();
          max_imag[t] = std::max(max_imag[t], std::abs(v.imag()));
        }
      pair += seconds_since(t0);
    }
    split.add(pre, pair);
    std::lock_guard<std::mutex> lock(sink_mutex);
    for (int t = 0; t < T; ++t) {
      finish_imag(grids[t], max_imag[t]);
      sink(i, t, std::move(grids[t]));
    }
  });
  split.report(timing, seconds_since(wall0), serial_pre);
}

InnerProductGrid bft_align(const PolarFourierSamples& a, const FourierBesselCoeffs& b,
                           const TranslationGrid& tgrid, const RotationGrid& rgrid) {
  InnerProductGrid out;
  bft_align_batch(std::span(&a, 1), std::span(&b, 1), tgrid, rgrid,
                  [&](int, int, InnerProductGrid&& g) { out = std::move(g); });
  return out;
}

// ---------------------------------------------------------------- FTK

namespace {

struct ModeGroup {
  int ell = 0;
  std::vector<int> terms;  // indices into the ordered term list
  Eigen::MatrixXd G;       // terms x M: 2 pi w_m sigma V(k_m)
};

}  // namespace

void ftk_align_batch(std::span<const FourierBesselCoeffs> images,
                     std::span<const FourierBesselCoeffs> templates, const TranslationKernelSVD& svd,
                     const TranslationGrid& tgrid, const RotationGrid& rgrid, const PairSink& sink,
                     EngineTiming* timing, int H, int threads) {
  if (images.empty() || templates.empty()) return;
  const auto wall0 = Clock::now();
  if (H < 0) H = svd.rank();
  if (H > static_cast<int>(svd.all_terms.size())) throw ArgumentError("ftk_align: H exceeds the computed terms");
  if (H < 1) throw ArgumentError("ftk_align: the plan keeps no terms");
  for (int j = 0; j < tgrid.size(); ++j) {
    if (tgrid.radius(j) > svd.D * (1.0 + 1e-9)) {
      throw ArgumentError("ftk_align: shift " + std::to_string(j) + " lies outside the plan's disk (|delta| = " +
                          std::to_string(tgrid.radius(j)) + " > D = " + std::to_string(svd.D) + ")");
    }
  }
  const FourierBesselCoeffs& ref = templates[0];
  for (const auto& x : images) check_same_layout(x, ref, "ftk_align");
  for (const auto& x : templates) check_same_layout(x, ref, "ftk_align");
  if (std::abs(ref.K - svd.K) > 1e-12 * svd.K) throw ArgumentError("ftk_align: plan and coefficients use different K");

  const int T = static_cast<int>(templates.size());
  const int N = tgrid.size();
  const int ng = rgrid.count;
  const int Q = ref.Q;
  const int C = 2 * Q + 1;
  const int M = ref.radial_count();
  const auto& rule = *ref.rule;

  // Group the leading H terms by translation order.
  std::map<int, ModeGroup> by_ell;
  for (int z = 0; z < H; ++z) {
    auto& g = by_ell[svd.all_terms[z].ell];
    g.ell = svd.all_terms[z].ell;
    g.terms.push_back(z);
  }
  std::vector<double> radii(N), knodes(rule.nodes);
  for (int j = 0; j < N; ++j) radii[j] = tgrid.radius(j);
  Eigen::MatrixXcd Y(N, H);
  std::map<int, Eigen::MatrixXd> left_cache;
  std::vector<ModeGroup> groups;
  for (auto& [ell, g] : by_ell) {
    const ModalSVD& mode = svd.mode(ell);
    const int a = std::abs(ell);
    auto it = left_cache.find(a);
    if (it == left_cache.end()) it = left_cache.emplace(a, mode.left_values(radii)).first;
    const Eigen::MatrixXd& U = it->second;
    const Eigen::MatrixXd V = mode.right_values(knodes);
    const double sign = (ell < 0 && a % 2 != 0) ? -1.0 : 1.0;
    g.G.resize(static_cast<Eigen::Index>(g.terms.size()), M);
    for (std::size_t e = 0; e < g.terms.size(); ++e) {
      const int z = g.terms[e];
      const int eta = svd.all_terms[z].eta;
      for (int m = 0; m < M; ++m) g.G(static_cast<Eigen::Index>(e), m) = 2.0 * kPi * rule.weights[m] * mode.sigma[eta] * V(m, eta);
      for (int j = 0; j < N; ++j) {
        Y(j, z) = sign * U(j, eta) * std::polar(1.0, -ell * (tgrid.angle(j) + kPi / 2.0));
      }
    }
    groups.push_back(std::move(g));
  }
  Eigen::MatrixXd Yr(N, 2 * H);
  Yr << Y.real(), -Y.imag();
  // Imaginary part on a spread subset of shifts, for the diagnostic.
  const int probe = std::min(N, 32);
  Eigen::MatrixXd Yi(probe, 2 * H);
  for (int p = 0; p < probe; ++p) {
    const int j = static_cast<int>(static_cast<long>(p) * N / probe);
    Yi.row(p) << Y.row(j).imag(), Y.row(j).real();
  }
  // Gz row z: 2 pi w_m sigma V(k_m) of term z. Bcat block q: conj(b_t(., q)) for all t.
  Eigen::MatrixXd Gz(H, M);
  std::vector<int> term_ell(H);
  for (const auto& g : groups)
    for (std::size_t e = 0; e < g.terms.size(); ++e) {
      Gz.row(g.terms[e]) = g.G.row(static_cast<Eigen::Index>(e));
      term_ell[g.terms[e]] = g.ell;
    }
  Eigen::MatrixXcd Bcat(M, static_cast<Eigen::Index>(C) * T);
  for (int q = 0; q < C; ++q)
    for (int t = 0; t < T; ++t) Bcat.col(static_cast<Eigen::Index>(q) * T + t) = templates[t].values.col(q).conjugate();
  const double serial_pre = seconds_since(wall0);

  TimeSplit split;
  std::mutex sink_mutex;
  detail::parallel_for(static_cast<int>(images.size()), threads, [&](int i) {
    auto t0 = Clock::now();
    const Eigen::MatrixXcd& a = images[i].values;
    // Per-image factor: Atil block q, row z = Gz(z, m) a(m, q - l_z).
    Eigen::MatrixXcd Atil = Eigen::MatrixXcd::Zero(H, static_cast<Eigen::Index>(M) * C);
    for (int z = 0; z < H; ++z) {
      const int ell = term_ell[z];
      for (int q = std::max(-Q, -Q + ell); q <= std::min(Q, Q + ell); ++q) {
        const Eigen::Index base = static_cast<Eigen::Index>(q + Q) * M;
        for (int m = 0; m < M; ++m) Atil(z, base + m) = Gz(z, m) * a(m, q - ell + Q);
      }
    }
    const double pre = seconds_since(t0);
    t0 = Clock::now();

    // Step 1: Z(z, t; q) = sum_m Atil(z, m; q) conj(b_t(m, q)).
    std::vector<cdouble> zbuf(static_cast<std::size_t>(H) * T * ng, cdouble(0.0));
    Eigen::MatrixXcd Zq(H, T);
    for (int q = -Q; q <= Q; ++q) {
      Zq.noalias() = Atil.middleCols(static_cast<Eigen::Index>(q + Q) * M, M) *
                     Bcat.middleCols(static_cast<Eigen::Index>(q + Q) * T, T);
      const int r = fold_index(q, ng);
      for (int t = 0; t < T; ++t)
        for (int z = 0; z < H; ++z) zbuf[(static_cast<std::size_t>(z) * T + t) * ng + r] += Zq(z, t);
    }
    // Step 2: transform over q.
    cached_fft_plan(ng, FftDirection::Forward, H * T).execute(zbuf.data(), zbuf.data());
    // Step 3: contract with the shift factors, all templates at once.
    Eigen::MatrixXd Zr(2 * H, static_cast<Eigen::Index>(ng) * T);
    for (int z = 0; z < H; ++z)
      for (int t = 0; t < T; ++t)
        for (int r = 0; r < ng; ++r) {
          const cdouble v = zbuf[(static_cast<std::size_t>(z) * T + t) * ng + r];
          Zr(z, static_cast<Eigen::Index>(t) * ng + r) = v.real();
          Zr(H + z, static_cast<Eigen::Index>(t) * ng + r) = v.imag();
        }
    const Eigen::MatrixXd X = Yr * Zr;
    const Eigen::MatrixXd Xi = Yi * Zr;
    std::vector<InnerProductGrid> grids(T);
    for (int t = 0; t < T; ++t) {
      grids[t].engine = "ftk";
      grids[t].values = X.middleCols(static_cast<Eigen::Index>(t) * ng, ng);
      const double mi = Xi.middleCols(static_cast<Eigen::Index>(t) * ng, ng).cwiseAbs().maxCoeff();
      finish_imag(grids[t], mi);
    }
    split.add(pre, seconds_since(t0));
    std::lock_guard<std::mutex> lock(sink_mutex);
    for (int t = 0; t < T; ++t) sink(i, t, std::move(grids[t]));
  });
  split.report(timing, seconds_since(wall0), serial_pre);
}

InnerProductGrid ftk_align(const FourierBesselCoeffs& a, const FourierBesselCoeffs& b,
                           const TranslationKernelSVD& svd, const TranslationGrid& tgrid,
                           const RotationGrid& rgrid, int H) {
  InnerProductGrid out;
  ftk_align_batch(std::span(&a, 1), std::span(&b, 1), svd, tgrid, rgrid,
                  [&](int, int, InnerProductGrid&& g) { out = std::move(g); }, nullptr, H);
  return out;
}

// ---------------------------------------------------------------- BFR

namespace {

struct CartesianSpectrum {
  int n = 0;
  int fft_size = 0;                 // correlation lattice size 2 n pad
  std::vector<int> u, v;            // lattice frequency k = (pi/2)(u, v), |k| <= K
  std::vector<int> slot;            // position in the fft_size^2 array
  std::vector<int> radius_index;    // into radii
  std::vector<double> radii;        // distinct |k|, increasing
};

CartesianSpectrum cartesian_spectrum(int n, int pad) {
  CartesianSpectrum s;
  s.n = n;
  s.fft_size = 2 * n * pad;
  std::map<int, int> key_to_radius;
  for (int u = -n; u <= n; ++u)
    for (int v = -n; v <= n; ++v)
      if (u * u + v * v <= n * n) key_to_radius[u * u + v * v] = 0;
  for (auto& [key, idx] : key_to_radius) {
    idx = static_cast<int>(s.radii.size());
    s.radii.push_back(0.5 * kPi * std::sqrt(static_cast<double>(key)));
  }
  const int F = s.fft_size;
  for (int u = -n; u <= n; ++u)
    for (int v = -n; v <= n; ++v) {
      if (u * u + v * v > n * n) continue;
      s.u.push_back(u);
      s.v.push_back(v);
      s.slot.push_back(fold_index(u, F) * F + fold_index(v, F));
      s.radius_index.push_back(key_to_radius[u * u + v * v]);
    }
  return s;
}

// Pixel-sum transform on the lattice by one zero-padded 2n x 2n FFT.
std::vector<cdouble> image_lattice_transform(const PixelImage& image, const CartesianSpectrum& s) {
  const int n = image.n, F = 2 * n;
  std::vector<cdouble> buf(static_cast<std::size_t>(F) * F, cdouble(0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) buf[static_cast<std::size_t>(i) * F + j] = image.at(i, j);
  FftPlan({F, F}, FftDirection::Forward).execute(buf.data(), buf.data());
  const double dx2 = image.dx() * image.dx();
  std::vector<cdouble> out(s.u.size());
  for (std::size_t c = 0; c < out.size(); ++c) {
    const int u = s.u[c], v = s.v[c];
    // x_i = -1 + 2i/n contributes exp(i pi (u + v) / 2).
    out[c] = dx2 * std::polar(1.0, 0.5 * kPi * (u + v)) * buf[static_cast<std::size_t>(fold_index(u, F)) * F + fold_index(v, F)];
  }
  return out;
}

// conj of the template transform at R_gamma k for every lattice point and
// every rotation: points x n_gamma, row-major.
std::vector<cdouble> rotated_template_table(const PixelImage& b, const CartesianSpectrum& s, int ng) {
  const double K = nyquist_frequency(b.n);
  const int Q = default_angular_order(K);
  auto rule = std::make_shared<QuadratureRule>();
  rule->radius = K;
  rule->nodes = s.radii;
  rule->weights.assign(s.radii.size(), 0.0);
  const FourierBesselCoeffs coeffs = fb_decompose(polar_fourier(b, rule, Q));

  const std::size_t P = s.u.size();
  std::vector<cdouble> table(P * ng, cdouble(0.0));
  for (std::size_t c = 0; c < P; ++c) {
    const double psi = std::atan2(static_cast<double>(s.v[c]), static_cast<double>(s.u[c]));
    const cdouble step = std::polar(1.0, -psi);
    cdouble ph = std::polar(1.0, Q * psi);
    cdouble* row = table.data() + c * ng;
    const int m = s.radius_index[c];
    for (int q = -Q; q <= Q; ++q) {
      row[fold_index(q, ng)] += std::conj(coeffs.values(m, q + Q)) * ph;
      ph *= step;
    }
  }
  cached_fft_plan(ng, FftDirection::Forward, static_cast<int>(P)).execute(table.data(), table.data());
  return table;
}

}  // namespace

void bfr_align_batch(std::span<const PixelImage> images, std::span<const PixelImage> templates,
                     const RotationGrid& rgrid, int pad, double D, const PairSink& sink,
                     EngineTiming* timing, int threads) {
  if (images.empty() || templates.empty()) return;
  if (pad < 1) throw ArgumentError("bfr_align: pad must be >= 1");
  const auto wall0 = Clock::now();
  const int n = images[0].n;
  for (const auto& x : images) if (x.n != n) throw ArgumentError("bfr_align: images differ in size");
  for (const auto& x : templates) if (x.n != n) throw ArgumentError("bfr_align: templates differ in size");
  const CartesianSpectrum spec = cartesian_spectrum(n, pad);
  const int F = spec.fft_size;
  const double s = (2.0 / n) / pad;
  const TranslationGrid lattice = make_translation_grid(D, s);
  if (2 * static_cast<int>(std::ceil(D / s)) + 1 > F) throw ArgumentError("bfr_align: shift disk exceeds the correlation lattice");
  std::vector<std::size_t> out_slot(lattice.size());
  for (int j = 0; j < lattice.size(); ++j) {
    const int a = static_cast<int>(std::lround(lattice.x[j] / s));
    const int b = static_cast<int>(std::lround(lattice.y[j] / s));
    out_slot[j] = static_cast<std::size_t>(fold_index(a, F)) * F + fold_index(b, F);
  }
  const double dk2 = 0.25 * kPi * kPi;
  const int ng = rgrid.count;
  const int N = lattice.size();
  const std::size_t P = spec.u.size();

  std::vector<std::vector<cdouble>> image_hat(images.size());
  detail::parallel_for(static_cast<int>(images.size()), threads,
                       [&](int i) { image_hat[i] = image_lattice_transform(images[i], spec); });
  const double serial_pre = seconds_since(wall0);

  TimeSplit split;
  std::mutex sink_mutex;
  const int I = static_cast<int>(images.size());
  for (std::size_t t = 0; t < templates.size(); ++t) {
    auto t0 = Clock::now();
    const std::vector<cdouble> table = rotated_template_table(templates[t], spec, ng);
    split.add(seconds_since(t0), 0.0);
    detail::parallel_for(I, threads, [&](int i) {
      const auto t1 = Clock::now();
      const FftPlan plan({F, F}, FftDirection::Forward);
      std::vector<cdouble> in(static_cast<std::size_t>(F) * F, cdouble(0.0)), out(in.size());
      InnerProductGrid g;
      g.engine = "bfr";
      g.values.resize(N, ng);
      double max_imag = 0.0;
      for (int r = 0; r < ng; ++r) {
        for (std::size_t c = 0; c < P; ++c) in[spec.slot[c]] = dk2 * image_hat[i][c] * table[c * ng + r];
        plan.execute(in.data(), out.data());
        for (int j = 0; j < N; ++j) {
          g.values(j, r) = out[out_slot[j]].real();
          max_imag = std::max(max_imag, std::abs(out[out_slot[j]].imag()));
        }
      }
      finish_imag(g, max_imag);
      split.add(0.0, seconds_since(t1));
      std::lock_guard<std::mutex> lock(sink_mutex);
      sink(i, static_cast<int>(t), std::move(g));
    });
  }
  split.report(timing, seconds_since(wall0), serial_pre);
}

InnerProductGrid bfr_align(const PixelImage& a, const PixelImage& b, const RotationGrid& rgrid, int pad,
                           double D) {
  InnerProductGrid out;
  bfr_align_batch(std::span(&a, 1), std::span(&b, 1), rgrid, pad, D,
                  [&](int, int, InnerProductGrid&& g) { out = std::move(g); });
  return out;
}

Alignment argmax_alignment(const InnerProductGrid& grid) {
  if (grid.values.size() == 0) throw ArgumentError("argmax_alignment: empty grid");
  Alignment best{0, 0, grid.values(0, 0)};
  for (int j = 0; j < grid.shifts(); ++j)
    for (int r = 0; r < grid.rotations(); ++r) {
      const double v = grid.values(j, r);
      if (!std::isfinite(v)) throw NumericalError("argmax_alignment: non-finite value");
      if (v > best.value) best = {j, r, v};
    }
  return best;
}

}  // namespace ftk
