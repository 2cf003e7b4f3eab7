#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <span>
#include <vector>

#include "ftk/fourier_bessel.hpp"

namespace ftk {

/// Operator SVD of J_l(delta k) on [0, D] x [0, K] under delta d delta and
/// k dk. Columns of u and v are coefficient vectors in RadialJacobiBasis(P, D)
/// and RadialJacobiBasis(P, K). All P singular values are kept; rank counts
/// those strictly above eps.
struct ModalSVD {
  int ell = 0;
  double D = 0.0;
  double K = 0.0;
  int rank = 0;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd u;
  Eigen::MatrixXd v;

  [[nodiscard]] int basis_size() const { return static_cast<int>(sigma.size()); }
  /// U_eta(delta_j) for all eta; rows follow deltas.
  [[nodiscard]] Eigen::MatrixXd left_values(std::span<const double> deltas) const;
  /// V_eta(k_j) for all eta; rows follow ks.
  [[nodiscard]] Eigen::MatrixXd right_values(std::span<const double> ks) const;
};

int default_basis_size(double W);

/// Throws NumericalError when the projected coefficients in the last two
/// basis rows or columns reach eps * 1e-2.
ModalSVD modal_svd(int ell, double D, double K, double eps, int P);

struct SvdTerm {
  int ell = 0;
  int eta = 0;  // zero-based index into the modal SVD
  double sigma = 0.0;
};

/// Global eps-truncated factorization of exp(-i delta . k) over the shift
/// disk of radius D and the frequency disk of radius K.
struct TranslationKernelSVD {
  double W = 0.0;
  double D = 0.0;
  double K = 0.0;
  double eps = 0.0;
  int P = 0;
  std::vector<ModalSVD> modes;     // ell = 0 .. max_order()
  std::vector<SvdTerm> all_terms;  // every computed value, both signs of ell, sorted

  [[nodiscard]] int rank() const { return rank_; }
  [[nodiscard]] int max_order() const { return static_cast<int>(modes.size()) - 1; }
  [[nodiscard]] int modal_rank(int ell) const;
  [[nodiscard]] std::span<const SvdTerm> terms() const { return {all_terms.data(), static_cast<std::size_t>(rank_)}; }
  [[nodiscard]] const ModalSVD& mode(int ell) const;

  /// Sorts all_terms and sets the rank from modes; used after loading.
  void finalize();

 private:
  int rank_ = 0;
};

/// Modal SVDs for 0 <= ell <= L_max, where L_max is the first order whose
/// rank_bound is zero. P <= 0 selects default_basis_size(W).
TranslationKernelSVD assemble_svd(double W, double K, double eps, int P = 0);

int rank_bound(int ell, double W, double eps);
int total_rank_bound(double W, double eps);

/// Smallest |ell| with rank_bound(ell, W, eps) == 0.
int max_kernel_order(double W, double eps);

/// Hilbert-Schmidt norm of F minus its rank-H' truncation, in the units of
/// the full kernel (2 pi times the modal singular values), so that
/// hs_error(svd, 0) ~ pi D K.
double hs_error(const TranslationKernelSVD& svd, int h_prime);

/// U_zeta(delta) exp(-i l (omega + pi/2)) for the zeta-th ordered term.
cdouble eval_left(const TranslationKernelSVD& svd, int zeta, double delta_x, double delta_y);
/// V_zeta(k) exp(i l psi) for the zeta-th ordered term.
cdouble eval_right(const TranslationKernelSVD& svd, int zeta, double k_x, double k_y);

/// Upper bound on RMS_{delta in disk, gamma}(X_H - X) for a rank-H expansion:
/// 2 pi Sigma_{H+1} sqrt(int k dk (2 pi sum|a|^2)(2 pi sum|b|^2)) / sqrt(2 pi * pi D^2).
double x_error_bound(const TranslationKernelSVD& svd, int H, const FourierBesselCoeffs& a,
                     const FourierBesselCoeffs& b);

/// Plan cache keyed by (W, K, eps, P).
std::filesystem::path plan_cache_file(const std::filesystem::path& dir, double W, double K,
                                      double eps, int P);
void save_plan(const std::filesystem::path& file, const TranslationKernelSVD& svd);
TranslationKernelSVD load_plan(const std::filesystem::path& file);
/// Loads from dir when present, otherwise builds and saves. hit reports which.
TranslationKernelSVD load_or_build_plan(const std::filesystem::path& dir, double W, double K,
                                        double eps, int P, bool* hit = nullptr);

}  // namespace ftk
