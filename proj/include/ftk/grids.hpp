#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace ftk {

enum class GridLayout { Cartesian, Polar, Explicit };

const char* layout_name(GridLayout layout);

/// Shift vectors inside the disk of radius D.
struct TranslationGrid {
  double D = 0.0;
  double spacing = 0.0;
  GridLayout layout = GridLayout::Explicit;
  std::vector<double> x;
  std::vector<double> y;

  [[nodiscard]] int size() const { return static_cast<int>(x.size()); }
  [[nodiscard]] double radius(int j) const;
  [[nodiscard]] double angle(int j) const;
};

/// Lattice of pitch s clipped to the disk, y outer and x inner.
TranslationGrid make_translation_grid(double D, double s);

/// Arbitrary shifts; throws ArgumentError if any lies outside the disk.
TranslationGrid explicit_translation_grid(double D, std::vector<double> x, std::vector<double> y);

/// Concentric rings of radius D r / rings, r = 1..rings, with counts
/// proportional to circumference, plus the origin.
TranslationGrid ring_translation_grid(double D, int rings, double points_per_unit_length);

struct RotationGrid {
  int count = 1;

  RotationGrid() = default;
  explicit RotationGrid(int n_gamma);
  [[nodiscard]] double angle(int r) const;
};

/// X(delta_j, gamma_r) for j < N rows and r < n_gamma columns.
struct InnerProductGrid {
  std::string engine;
  Eigen::MatrixXd values;
  double imag_residual = 0.0;  // max |Im X| / max |X|

  [[nodiscard]] int shifts() const { return static_cast<int>(values.rows()); }
  [[nodiscard]] int rotations() const { return static_cast<int>(values.cols()); }
};

/// For each shift of a, the index of the shift of b within tol, or -1.
std::vector<int> match_shifts(const TranslationGrid& a, const TranslationGrid& b, double tol);

/// Rows dx,dy,gamma,X.
void write_grid_csv(const std::filesystem::path& file, const InnerProductGrid& grid,
                    const TranslationGrid& tgrid, const RotationGrid& rgrid);

/// Text descriptor terminated by END, then shift coordinates and values as
/// float64 (values row-major by shift).
void write_grid_binary(const std::filesystem::path& file, const InnerProductGrid& grid,
                       const TranslationGrid& tgrid, const RotationGrid& rgrid);
InnerProductGrid read_grid_binary(const std::filesystem::path& file, TranslationGrid* tgrid = nullptr,
                                  RotationGrid* rgrid = nullptr);

}  // namespace ftk
