#include "ftk/interpolation.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "ftk/errors.hpp"

namespace ftk {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMaxCondition = 1e12;

// Nodes of an n-point Gauss-Legendre rule on [0, 1].
struct UnitRule {
  std::vector<double> t, w;
};

UnitRule gauss_legendre_unit(int count) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(count, count);
  for (int k = 1; k < count; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  UnitRule r;
  for (int i = 0; i < count; ++i) {
    r.t.push_back(0.5 * (es.eigenvalues()(i) + 1.0));
    r.w.push_back(es.eigenvectors()(0, i) * es.eigenvectors()(0, i));
  }
  return r;
}

// Gauss-Jacobi rule resolving products J_l(a k) J_l(b k) on [0, K] for a, b <= rmax.
QuadratureRule product_rule(double rmax, double K) {
  return gauss_jacobi_rule(static_cast<int>(std::ceil(2.0 * rmax * K)) + 32, K);
}

// Squared plane-wave residual of bilinear interpolation at offset (fx, fy)
// in a cell of pitch h.
struct BilinearCell {
  double h, K, g0, gh, gd;

  BilinearCell(double h_, double K_)
      : h(h_), K(K_), g0(disk_kernel(0.0, K_)), gh(disk_kernel(h_, K_)), gd(disk_kernel(std::sqrt(2.0) * h_, K_)) {}

  [[nodiscard]] double energy(double fx, double fy) const {
    const double px[4] = {0.0, 1.0, 0.0, 1.0};
    const double py[4] = {0.0, 0.0, 1.0, 1.0};
    const double w[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
    // Corner Gram matrix: 0 on the diagonal, h on edges, h sqrt 2 across.
    const double edge = w[0] * w[1] + w[0] * w[2] + w[1] * w[3] + w[2] * w[3];
    const double diag = w[0] * w[3] + w[1] * w[2];
    double e = g0 * (1.0 + w[0] * w[0] + w[1] * w[1] + w[2] * w[2] + w[3] * w[3]) + 2.0 * gh * edge + 2.0 * gd * diag;
    for (int a = 0; a < 4; ++a) e -= 2.0 * w[a] * disk_kernel(h * std::hypot(px[a] - fx, py[a] - fy), K);
    return std::max(e, 0.0);
  }
};

double snap(double t) {
  const double r = std::round(t);
  return std::abs(t - r) < 1e-9 ? r : t;
}

double max_radius(const TranslationGrid& g) {
  double r = g.D;
  for (int j = 0; j < g.size(); ++j) r = std::max(r, g.radius(j));
  return r;
}

int node_hit(const TranslationGrid& nodes, double qx, double qy) {
  const double tol = 1e-12 * max_radius(nodes);
  for (int z = 0; z < nodes.size(); ++z) {
    if (std::hypot(nodes.x[z] - qx, nodes.y[z] - qy) <= tol) return z;
  }
  return -1;
}

void check_distinct(const TranslationGrid& nodes, const char* who) {
  if (nodes.size() == 0) throw ArgumentError(std::string(who) + ": empty node set");
  const double tol = 1e-12 * max_radius(nodes);
  for (int a = 0; a < nodes.size(); ++a)
    for (int b = a + 1; b < nodes.size(); ++b)
      if (std::hypot(nodes.x[a] - nodes.x[b], nodes.y[a] - nodes.y[b]) <= tol)
        throw ArgumentError(std::string(who) + ": nodes " + std::to_string(a) + " and " + std::to_string(b) +
                            " coincide");
}

// Solves the symmetric system through its eigendecomposition; throws when
// the condition number exceeds the limit.
struct SymmetricSolver {
  Eigen::MatrixXd vecs;
  Eigen::VectorXd vals;
  double condition = 1.0;

  explicit SymmetricSolver(const Eigen::MatrixXd& M) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    vecs = es.eigenvectors();
    vals = es.eigenvalues();
    const double lo = vals.minCoeff(), hi = vals.maxCoeff();
    condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(condition <= kMaxCondition)) {
      throw NumericalError("LS node system is ill-conditioned (condition " + std::to_string(condition) +
                           "); use fewer nodes or spread them further apart");
    }
  }
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const {
    return vecs * (vals.cwiseInverse().asDiagonal() * (vecs.transpose() * rhs));
  }
};

double kernel_value(const LsKernelCheck& check, double x1, double y1, double x2, double y2, double K) {
  const double r = std::hypot(x1 - x2, y1 - y2);
  switch (check.path) {
    case LsKernelPath::Published:
      return ls_kernel_published(r, K);
    case LsKernelPath::Graf:
      return ls_kernel_graf(r, K);
    case LsKernelPath::Quadrature:
      break;
  }
  return ls_kernel_quadrature(x1, y1, x2, y2, K);
}

}  // namespace

// ---------------------------------------------------------------- bilinear

TranslationGrid bilinear_nodes(double D, double h) {
  if (!(D >= 0.0) || !(h > 0.0)) throw ArgumentError("bilinear_nodes: need D >= 0 and h > 0");
  const int c = static_cast<int>(std::ceil(D / h)) + 1;
  std::map<std::pair<int, int>, bool> keep;  // (j, i): y outer
  for (int j = -c; j < c; ++j) {
    for (int i = -c; i < c; ++i) {
      const double cx = std::clamp(0.0, i * h, (i + 1) * h);
      const double cy = std::clamp(0.0, j * h, (j + 1) * h);
      if (std::hypot(cx, cy) > D * (1.0 + 1e-12)) continue;
      for (int dj = 0; dj < 2; ++dj)
        for (int di = 0; di < 2; ++di) keep[{j + dj, i + di}] = true;
    }
  }
  TranslationGrid g;
  g.D = D;
  g.spacing = h;
  g.layout = GridLayout::Cartesian;
  for (const auto& [key, unused] : keep) {
    g.x.push_back(key.second * h);
    g.y.push_back(key.first * h);
  }
  return g;
}

std::vector<BilinearStencil> bilinear_stencils(const TranslationGrid& nodes, double h,
                                               const TranslationGrid& queries) {
  std::map<std::pair<int, int>, int> index;
  for (int z = 0; z < nodes.size(); ++z) {
    index[{static_cast<int>(std::lround(nodes.x[z] / h)), static_cast<int>(std::lround(nodes.y[z] / h))}] = z;
  }
  std::vector<BilinearStencil> out(queries.size());
  for (int q = 0; q < queries.size(); ++q) {
    const double tx = snap(queries.x[q] / h), ty = snap(queries.y[q] / h);
    const int i = static_cast<int>(std::floor(tx)), j = static_cast<int>(std::floor(ty));
    const double fx = tx - i, fy = ty - j;
    const int ci[4] = {i, i + 1, i, i + 1};
    const int cj[4] = {j, j, j + 1, j + 1};
    const double w[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
    for (int a = 0; a < 4; ++a) {
      auto it = index.find({ci[a], cj[a]});
      if (it == index.end()) {
        if (w[a] == 0.0) {
          out[q].node[a] = 0;
          out[q].weight[a] = 0.0;
          continue;
        }
        throw ArgumentError("bilinear_stencils: query " + std::to_string(q) + " falls outside the node lattice");
      }
      out[q].node[a] = it->second;
      out[q].weight[a] = w[a];
    }
  }
  return out;
}

InnerProductGrid linear_interp_align(const PolarFourierSamples& a, const FourierBesselCoeffs& b, double h,
                                     const TranslationGrid& tgrid, const RotationGrid& rgrid) {
  const TranslationGrid nodes = bilinear_nodes(max_radius(tgrid), h);
  const InnerProductGrid exact = bft_align(a, b, nodes, rgrid);
  const auto stencils = bilinear_stencils(nodes, h, tgrid);
  InnerProductGrid out;
  out.engine = "linear";
  out.imag_residual = exact.imag_residual;
  out.values.setZero(tgrid.size(), rgrid.count);
  for (int q = 0; q < tgrid.size(); ++q)
    for (int c = 0; c < 4; ++c) out.values.row(q) += stencils[q].weight[c] * exact.values.row(stencils[q].node[c]);
  return out;
}

double disk_kernel(double r, double K) {
  const double x = K * r;
  if (x < 1e-8) return kPi * K * K;
  return 2.0 * kPi * K * bessel_j(1, x) / r;
}

double plane_wave_residual(const TranslationGrid& nodes, std::span<const int> idx, std::span<const double> w,
                           double qx, double qy, double K) {
  if (idx.size() != w.size()) throw ArgumentError("plane_wave_residual: size mismatch");
  const std::size_t n = idx.size();
  std::vector<double> px(n + 1), py(n + 1), c(n + 1);
  px[0] = qx;
  py[0] = qy;
  c[0] = 1.0;
  for (std::size_t a = 0; a < n; ++a) {
    px[a + 1] = nodes.x[idx[a]];
    py[a + 1] = nodes.y[idx[a]];
    c[a + 1] = -w[a];
  }
  double e = 0.0;
  for (std::size_t a = 0; a <= n; ++a)
    for (std::size_t b = 0; b <= n; ++b) e += c[a] * c[b] * disk_kernel(std::hypot(px[a] - px[b], py[a] - py[b]), K);
  return std::sqrt(std::max(e, 0.0));
}

double bilinear_hs_error(double D, double h, double K) {
  if (!(D > 0.0) || !(h > 0.0) || !(K > 0.0)) throw ArgumentError("bilinear_hs_error: need positive D, h, K");
  static const UnitRule inner = gauss_legendre_unit(8);
  static const UnitRule edge = gauss_legendre_unit(16);
  const BilinearCell cell(h, K);
  // The residual depends only on the offset within a cell, so every cell
  // inside the disk contributes the same amount.
  double full = 0.0;
  for (std::size_t a = 0; a < inner.t.size(); ++a)
    for (std::size_t b = 0; b < inner.t.size(); ++b) full += inner.w[a] * inner.w[b] * cell.energy(inner.t[a], inner.t[b]);
  full *= h * h;
  const int c = static_cast<int>(std::ceil(D / h)) + 1;
  double total = 0.0;
  for (int j = -c; j < c; ++j) {
    for (int i = -c; i < c; ++i) {
      const double nx = std::clamp(0.0, i * h, (i + 1) * h), ny = std::clamp(0.0, j * h, (j + 1) * h);
      if (std::hypot(nx, ny) > D) continue;
      const double fx0 = std::max(std::abs(i * h), std::abs((i + 1) * h));
      const double fy0 = std::max(std::abs(j * h), std::abs((j + 1) * h));
      if (std::hypot(fx0, fy0) <= D) {
        total += full;
        continue;
      }
      for (std::size_t a = 0; a < edge.t.size(); ++a) {
        for (std::size_t b = 0; b < edge.t.size(); ++b) {
          if (std::hypot((i + edge.t[a]) * h, (j + edge.t[b]) * h) > D) continue;
          total += edge.w[a] * edge.w[b] * h * h * cell.energy(edge.t[a], edge.t[b]);
        }
      }
    }
  }
  return std::sqrt(total);
}

double bilinear_pitch_for_nodes(double D, int count) {
  if (count < 1) throw ArgumentError("bilinear_pitch_for_nodes: count must be positive");
  // Node count is non-increasing in h up to lattice effects; bisect on log h
  // and keep the best match seen.
  double lo = D / 200.0, hi = 4.0 * D;
  double best = hi;
  int best_gap = std::abs(bilinear_nodes(D, hi).size() - count);
  for (int it = 0; it < 60; ++it) {
    const double mid = std::sqrt(lo * hi);
    const int got = bilinear_nodes(D, mid).size();
    const int gap = std::abs(got - count);
    if (gap < best_gap || (gap == best_gap && mid > best)) {
      best_gap = gap;
      best = mid;
    }
    if (got > count) lo = mid;
    else hi = mid;
  }
  return best;
}

int bilinear_nodes_for_error(double D, double K, double target, double* pitch) {
  if (!(target > 0.0)) throw ArgumentError("bilinear_nodes_for_error: target must be positive");
  double hi = D, lo = D;
  while (bilinear_hs_error(D, lo, K) > target) {
    hi = lo;
    lo *= 0.5;
    if (lo < D * 1e-4) throw NumericalError("bilinear_nodes_for_error: target not reached");
  }
  if (lo == hi) {
    if (pitch) *pitch = lo;
    return bilinear_nodes(D, lo).size();
  }
  for (int it = 0; it < 24; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (bilinear_hs_error(D, mid, K) > target) hi = mid;
    else lo = mid;
  }
  if (pitch) *pitch = lo;
  return bilinear_nodes(D, lo).size();
}

// ---------------------------------------------------------------- least squares

const char* ls_path_name(LsKernelPath path) {
  switch (path) {
    case LsKernelPath::Published:
      return "published";
    case LsKernelPath::Graf:
      return "graf";
    case LsKernelPath::Quadrature:
      return "quadrature";
  }
  return "?";
}

double ls_kernel_published(double r, double K) { return bessel_j(0, K * r) + bessel_j(1, K * r); }

double ls_kernel_graf(double r, double K) {
  const double x = K * r;
  if (x < 1e-8) return 0.5 * K * K;
  return K * K * bessel_j(1, x) / x;
}

double ls_kernel_graf_derivative(double r, double K) {
  const double x = K * r;
  if (x < 1e-8) return -K * K * K * x / 8.0;
  return -K * K * K * bessel_j(2, x) / x;
}

double ls_kernel_quadrature(double x1, double y1, double x2, double y2, double K, int L) {
  const double a = std::hypot(x1, y1), b = std::hypot(x2, y2);
  const double dw = std::atan2(y2, x2) - std::atan2(y1, x1);
  if (L < 0) L = oracle_translation_order(std::max(a, b), K);
  const QuadratureRule rule = product_rule(std::max(a, b), K);
  std::vector<double> ja(L + 1), jb(L + 1);
  double s = 0.0;
  for (int m = 0; m < rule.size(); ++m) {
    bessel_j_sequence(a * rule.nodes[m], ja);
    bessel_j_sequence(b * rule.nodes[m], jb);
    double v = ja[0] * jb[0];
    for (int l = 1; l <= L; ++l) v += 2.0 * std::cos(l * dw) * ja[l] * jb[l];
    s += rule.weights[m] * v;
  }
  return s;
}

LsKernelCheck validate_ls_kernel(const TranslationGrid& nodes, double K, double tol) {
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < nodes.size(); ++a)
    for (int b = a; b < nodes.size(); ++b) pairs.emplace_back(a, b);
  constexpr std::size_t kMaxPairs = 300;
  if (pairs.size() > kMaxPairs) {
    std::vector<std::pair<int, int>> picked;
    for (std::size_t t = 0; t < kMaxPairs; ++t) picked.push_back(pairs[t * pairs.size() / kMaxPairs]);
    pairs.swap(picked);
  }
  std::vector<double> o, p, g;
  for (const auto& [a, b] : pairs) {
    o.push_back(ls_kernel_quadrature(nodes.x[a], nodes.y[a], nodes.x[b], nodes.y[b], K));
    const double r = std::hypot(nodes.x[a] - nodes.x[b], nodes.y[a] - nodes.y[b]);
    p.push_back(ls_kernel_published(r, K));
    g.push_back(ls_kernel_graf(r, K));
  }
  double omax = 0.0;
  for (double v : o) omax = std::max(omax, std::abs(v));
  auto fit = [&](const std::vector<double>& f, double* scale) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      num += o[i] * f[i];
      den += f[i] * f[i];
    }
    *scale = den > 0.0 ? num / den : 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(o[i] - *scale * f[i]));
    return omax > 0.0 ? worst / omax : 0.0;
  };
  LsKernelCheck out;
  double cp = 0.0, cg = 0.0;
  out.published_misfit = fit(p, &cp);
  out.graf_misfit = fit(g, &cg);
  if (out.published_misfit <= tol && cp > 0.0) {
    out.path = LsKernelPath::Published;
    out.scale = cp;
  } else if (out.graf_misfit <= tol && cg > 0.0) {
    out.path = LsKernelPath::Graf;
    out.scale = cg;
  } else {
    out.path = LsKernelPath::Quadrature;
    out.scale = 1.0;
  }
  return out;
}

LsWeights ls_weights(const TranslationGrid& nodes, double qx, double qy, double K) {
  return ls_weights(nodes, qx, qy, K, validate_ls_kernel(nodes, K));
}

LsWeights ls_weights(const TranslationGrid& nodes, double qx, double qy, double K, const LsKernelCheck& check) {
  check_distinct(nodes, "ls_weights");
  const int n = nodes.size();
  LsWeights out;
  out.path = check.path;
  Eigen::MatrixXd M(n, n);
  Eigen::VectorXd g(n);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) M(a, b) = M(b, a) = kernel_value(check, nodes.x[a], nodes.y[a], nodes.x[b], nodes.y[b], K);
  }
  const SymmetricSolver solver(M);
  out.condition = solver.condition;
  const int hit = node_hit(nodes, qx, qy);
  if (hit >= 0) {
    out.weights = Eigen::VectorXd::Unit(n, hit);
    return out;
  }
  for (int a = 0; a < n; ++a) g(a) = kernel_value(check, nodes.x[a], nodes.y[a], qx, qy, K);
  out.weights = solver.solve(g);
  return out;
}

LsObjective::LsObjective(double D_, double K_, int radial, int angular) : D(D_), K(K_) {
  if (!(D > 0.0) || !(K > 0.0) || radial < 1 || angular < 1) throw ArgumentError("LsObjective: bad arguments");
  const QuadratureRule r = gauss_jacobi_rule(radial, D);
  double total = 0.0;
  for (double w : r.weights) total += w;
  for (int i = 0; i < r.size(); ++i) {
    for (int p = 0; p < angular; ++p) {
      const double t = 2.0 * kPi * (p + 0.5) / angular;
      sx.push_back(r.nodes[i] * std::cos(t));
      sy.push_back(r.nodes[i] * std::sin(t));
      sw.push_back(r.weights[i] / total / angular);
    }
  }
}

double LsObjective::value(const TranslationGrid& nodes) const { return value_and_gradient(nodes, nullptr); }

double LsObjective::value_and_gradient(const TranslationGrid& nodes, Eigen::VectorXd* grad) const {
  check_distinct(nodes, "LsObjective");
  const int n = nodes.size();
  const int S = static_cast<int>(sx.size());
  Eigen::MatrixXd M(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      M(a, b) = M(b, a) = ls_kernel_graf(std::hypot(nodes.x[a] - nodes.x[b], nodes.y[a] - nodes.y[b]), K);
  Eigen::MatrixXd G(n, S);
  for (int a = 0; a < n; ++a)
    for (int s = 0; s < S; ++s) G(a, s) = ls_kernel_graf(std::hypot(nodes.x[a] - sx[s], nodes.y[a] - sy[s]), K);
  const SymmetricSolver solver(M);
  const Eigen::MatrixXd Y = solver.solve(G);
  const double g0 = ls_kernel_graf(0.0, K);
  double value = 0.0;
  for (int s = 0; s < S; ++s) value += sw[s] * 2.0 * kPi * (g0 - G.col(s).dot(Y.col(s)));
  if (!grad) return value;

  grad->setZero(2 * n);
  for (int z = 0; z < n; ++z) {
    double gx = 0.0, gy = 0.0;
    for (int s = 0; s < S; ++s) {
      const double yz = Y(z, s);
      double ax = 0.0, ay = 0.0;
      const double ex = nodes.x[z] - sx[s], ey = nodes.y[z] - sy[s];
      const double r = std::hypot(ex, ey);
      if (r > 0.0) {
        const double d = ls_kernel_graf_derivative(r, K) / r;
        ax -= 2.0 * d * ex;
        ay -= 2.0 * d * ey;
      }
      for (int b = 0; b < n; ++b) {
        if (b == z) continue;
        const double bx = nodes.x[z] - nodes.x[b], by = nodes.y[z] - nodes.y[b];
        const double rb = std::hypot(bx, by);
        const double d = ls_kernel_graf_derivative(rb, K) / rb;
        ax += 2.0 * Y(b, s) * d * bx;
        ay += 2.0 * Y(b, s) * d * by;
      }
      gx += sw[s] * yz * ax;
      gy += sw[s] * yz * ay;
    }
    (*grad)(2 * z) = 2.0 * kPi * gx;
    (*grad)(2 * z + 1) = 2.0 * kPi * gy;
  }
  return value;
}

DescentResult ls_node_descent(const TranslationGrid& initial, double K, double D, int steps, double rate) {
  if (steps < 0 || !(rate > 0.0)) throw ArgumentError("ls_node_descent: need steps >= 0 and rate > 0");
  const LsObjective objective(D, K);
  DescentResult out;
  out.nodes = initial;
  Eigen::VectorXd grad;
  double current = objective.value_and_gradient(out.nodes, &grad);
  out.history.push_back(current);
  for (int step = 0; step < steps; ++step) {
    bool accepted = false;
    for (int halving = 0; halving < 40 && !accepted; ++halving, rate *= 0.5) {
      TranslationGrid trial = out.nodes;
      for (int z = 0; z < trial.size(); ++z) {
        double x = trial.x[z] - rate * grad(2 * z), y = trial.y[z] - rate * grad(2 * z + 1);
        const double r = std::hypot(x, y);
        if (r > D) {
          x *= D / r;
          y *= D / r;
        }
        trial.x[z] = x;
        trial.y[z] = y;
      }
      Eigen::VectorXd trial_grad;
      double value;
      try {
        value = objective.value_and_gradient(trial, &trial_grad);
      } catch (const NumericalError&) {
        continue;
      } catch (const ArgumentError&) {
        continue;
      }
      if (!(value <= current)) continue;
      out.nodes = std::move(trial);
      grad = std::move(trial_grad);
      current = value;
      accepted = true;
    }
    if (!accepted) break;
    out.history.push_back(current);
    rate *= 4.0;  // undo the loop's last halving and try a larger step next time
  }
  return out;
}

// ---------------------------------------------------------------- generalized least squares

double bessel_product_integral(int ell, double a, double b, double K) {
  const QuadratureRule rule = product_rule(std::max(a, b), K);
  double s = 0.0;
  for (int m = 0; m < rule.size(); ++m) s += rule.weights[m] * bessel_j(ell, a * rule.nodes[m]) * bessel_j(ell, b * rule.nodes[m]);
  return s;
}

std::vector<cdouble> gls_weights(const TranslationGrid& nodes, double qx, double qy, int ell, double K) {
  check_distinct(nodes, "gls_weights");
  const int n = nodes.size();
  std::vector<cdouble> out(n, 0.0);
  const int hit = node_hit(nodes, qx, qy);
  if (hit >= 0) {
    out[hit] = 1.0;
    return out;
  }
  // Distinct radii; the origin carries no signal for l != 0.
  const double rmax = max_radius(nodes);
  const double tol = 1e-12 * rmax;
  std::vector<double> radii;
  std::vector<int> group(n, -1);
  for (int z = 0; z < n; ++z) {
    const double r = nodes.radius(z);
    if (ell != 0 && r <= tol) continue;
    int g = -1;
    for (std::size_t i = 0; i < radii.size(); ++i)
      if (std::abs(radii[i] - r) <= tol) g = static_cast<int>(i);
    if (g < 0) {
      g = static_cast<int>(radii.size());
      radii.push_back(r);
    }
    group[z] = g;
  }
  if (radii.empty()) return out;
  const double delta = std::hypot(qx, qy);
  const int R = static_cast<int>(radii.size());
  const QuadratureRule rule = product_rule(std::max(rmax, delta), K);
  Eigen::MatrixXd J(rule.size(), R + 1);
  for (int m = 0; m < rule.size(); ++m) {
    for (int i = 0; i < R; ++i) J(m, i) = bessel_j(ell, radii[i] * rule.nodes[m]);
    J(m, R) = bessel_j(ell, delta * rule.nodes[m]);
  }
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(rule.weights.data(), rule.size());
  const Eigen::MatrixXd Kmat = J.leftCols(R).transpose() * w.asDiagonal() * J.leftCols(R);
  const Eigen::VectorXd rhs = J.leftCols(R).transpose() * w.asDiagonal() * J.col(R);
  // Minimum-norm solution; tiny eigenvalues belong to radii the band cannot separate.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Kmat);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(R);
  for (int i = 0; i < R; ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam > 1e-14 * top) u += es.eigenvectors().col(i) * (es.eigenvectors().col(i).dot(rhs) / lam);
  }
  std::vector<int> members(R, 0);
  for (int z = 0; z < n; ++z)
    if (group[z] >= 0) ++members[group[z]];
  const double omega = std::atan2(qy, qx);
  for (int z = 0; z < n; ++z) {
    if (group[z] < 0) continue;
    out[z] = std::polar(u(group[z]) / members[group[z]], -ell * (omega - nodes.angle(z)));
  }
  return out;
}

double modal_residual(const TranslationGrid& nodes, double qx, double qy, double K, int L,
                      const std::function<std::vector<cdouble>(int)>& weights) {
  const int n = nodes.size();
  const double delta = std::hypot(qx, qy), omega = std::atan2(qy, qx);
  const QuadratureRule rule = product_rule(std::max(max_radius(nodes), delta), K);
  double total = 0.0;
  for (int ell = -L; ell <= L; ++ell) {
    const std::vector<cdouble> Y = weights(ell);
    if (static_cast<int>(Y.size()) != n) throw ArgumentError("modal_residual: weight count mismatch");
    std::vector<cdouble> phase(n);
    for (int z = 0; z < n; ++z) phase[z] = Y[z] * std::polar(1.0, -ell * (nodes.angle(z) + kPi / 2.0));
    const cdouble p0 = std::polar(1.0, -ell * (omega + kPi / 2.0));
    for (int m = 0; m < rule.size(); ++m) {
      const double k = rule.nodes[m];
      cdouble r = bessel_j(ell, delta * k) * p0;
      for (int z = 0; z < n; ++z) r -= phase[z] * bessel_j(ell, nodes.radius(z) * k);
      total += rule.weights[m] * std::norm(r);
    }
  }
  return 2.0 * kPi * total;
}

// ---------------------------------------------------------------- error profiles

double ftk_shift_error(const TranslationKernelSVD& svd, int H, double delta) {
  if (H < 0 || H > static_cast<int>(svd.all_terms.size())) throw ArgumentError("ftk_shift_error: H out of range");
  if (!(delta >= 0.0) || delta > svd.D * (1.0 + 1e-12)) throw ArgumentError("ftk_shift_error: shift outside the plan disk");
  std::vector<Eigen::MatrixXd> U;
  for (const ModalSVD& m : svd.modes) U.push_back(m.left_values(std::span<const double>(&delta, 1)));
  double s = 0.0;
  for (std::size_t z = H; z < svd.all_terms.size(); ++z) {
    const SvdTerm& t = svd.all_terms[z];
    const double u = U[std::abs(t.ell)](0, t.eta);
    s += t.sigma * t.sigma * u * u;
  }
  // Orders beyond the plan contribute their whole energy.
  const int lo = svd.max_order() + 1;
  const int hi = lo + static_cast<int>(std::ceil(delta * svd.K)) + 40;
  const QuadratureRule rule = product_rule(delta, svd.K);
  std::vector<double> j(hi + 1);
  for (int m = 0; m < rule.size(); ++m) {
    bessel_j_sequence(delta * rule.nodes[m], j);
    double v = 0.0;
    for (int l = lo; l <= hi; ++l) v += j[l] * j[l];
    s += 2.0 * rule.weights[m] * v;
  }
  return std::sqrt(2.0 * kPi * s);
}

double bilinear_shift_error(double D, double h, double K, double x, double y) {
  if (std::hypot(x, y) > D * (1.0 + 1e-12)) throw ArgumentError("bilinear_shift_error: shift outside the disk");
  const double tx = snap(x / h), ty = snap(y / h);
  return std::sqrt(BilinearCell(h, K).energy(tx - std::floor(tx), ty - std::floor(ty)));
}

}  // namespace ftk
