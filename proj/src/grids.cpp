#include "ftk/grids.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ftk/errors.hpp"
#include "ftk/image_io.hpp"

namespace ftk {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr const char* kGridMagic = "ftk-grid 1";

bool inside(double x, double y, double D) { return std::hypot(x, y) <= D * (1.0 + 1e-12); }

GridLayout parse_layout(const std::string& s) {
  if (s == "cartesian") return GridLayout::Cartesian;
  if (s == "polar") return GridLayout::Polar;
  if (s == "explicit") return GridLayout::Explicit;
  throw IoError("unknown grid layout '" + s + "'");
}

void write_doubles(std::ofstream& out, const double* p, std::size_t count) {
  out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(count * sizeof(double)));
}

void read_doubles(std::ifstream& in, double* p, std::size_t count) {
  in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw IoError("grid file: truncated payload");
}

}  // namespace

const char* layout_name(GridLayout layout) {
  switch (layout) {
    case GridLayout::Cartesian: return "cartesian";
    case GridLayout::Polar: return "polar";
    case GridLayout::Explicit: return "explicit";
  }
  return "explicit";
}

double TranslationGrid::radius(int j) const { return std::hypot(x[j], y[j]); }
double TranslationGrid::angle(int j) const { return std::atan2(y[j], x[j]); }

TranslationGrid make_translation_grid(double D, double s) {
  if (!(s > 0.0) || !(D >= 0.0)) throw ArgumentError("make_translation_grid: need s > 0 and D >= 0");
  TranslationGrid g;
  g.D = D;
  g.spacing = s;
  g.layout = GridLayout::Cartesian;
  const int r = static_cast<int>(std::floor(D / s * (1.0 + 1e-12)));
  for (int b = -r; b <= r; ++b)
    for (int a = -r; a <= r; ++a) {
      if (!inside(a * s, b * s, D)) continue;
      g.x.push_back(a * s);
      g.y.push_back(b * s);
    }
  return g;
}

TranslationGrid explicit_translation_grid(double D, std::vector<double> x, std::vector<double> y) {
  if (x.size() != y.size() || x.empty()) throw ArgumentError("explicit_translation_grid: need matching nonempty x, y");
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!inside(x[j], y[j], D)) throw ArgumentError("explicit_translation_grid: shift outside the disk");
  }
  TranslationGrid g;
  g.D = D;
  g.layout = GridLayout::Explicit;
  g.x = std::move(x);
  g.y = std::move(y);
  g.spacing = D * std::sqrt(kPi / static_cast<double>(g.x.size()));
  return g;
}

TranslationGrid ring_translation_grid(double D, int rings, double points_per_unit_length) {
  if (rings < 0 || !(D > 0.0) || !(points_per_unit_length > 0.0)) {
    throw ArgumentError("ring_translation_grid: bad parameters");
  }
  TranslationGrid g;
  g.D = D;
  g.layout = GridLayout::Polar;
  g.x.push_back(0.0);
  g.y.push_back(0.0);
  for (int r = 1; r <= rings; ++r) {
    const double rho = D * r / rings;
    const int count = std::max(3, static_cast<int>(std::lround(2.0 * kPi * rho * points_per_unit_length)));
    for (int p = 0; p < count; ++p) {
      const double om = 2.0 * kPi * (p + 0.5 * (r % 2)) / count;
      g.x.push_back(rho * std::cos(om));
      g.y.push_back(rho * std::sin(om));
    }
  }
  g.spacing = D * std::sqrt(kPi / static_cast<double>(g.x.size()));
  return g;
}

RotationGrid::RotationGrid(int n_gamma) : count(n_gamma) {
  if (n_gamma < 1) throw ArgumentError("RotationGrid: need at least one angle");
}

double RotationGrid::angle(int r) const { return 2.0 * kPi * r / count; }

std::vector<int> match_shifts(const TranslationGrid& a, const TranslationGrid& b, double tol) {
  std::vector<int> out(a.size(), -1);
  for (int i = 0; i < a.size(); ++i) {
    double best = tol;
    for (int j = 0; j < b.size(); ++j) {
      const double d = std::hypot(a.x[i] - b.x[j], a.y[i] - b.y[j]);
      if (d <= best) {
        best = d;
        out[i] = j;
      }
    }
  }
  return out;
}

void write_grid_csv(const std::filesystem::path& file, const InnerProductGrid& grid,
                    const TranslationGrid& tgrid, const RotationGrid& rgrid) {
  if (grid.shifts() != tgrid.size() || grid.rotations() != rgrid.count) {
    throw ArgumentError("write_grid_csv: grid shape does not match the shift/rotation grids");
  }
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out << "dx,dy,gamma,X\n";
  for (int j = 0; j < grid.shifts(); ++j)
    for (int r = 0; r < grid.rotations(); ++r) {
      out << format_exact(tgrid.x[j]) << ',' << format_exact(tgrid.y[j]) << ',' << format_exact(rgrid.angle(r))
          << ',' << format_exact(grid.values(j, r)) << '\n';
    }
  if (!out) throw IoError("write failed for " + file.string());
}

void write_grid_binary(const std::filesystem::path& file, const InnerProductGrid& grid,
                       const TranslationGrid& tgrid, const RotationGrid& rgrid) {
  if (grid.shifts() != tgrid.size() || grid.rotations() != rgrid.count) {
    throw ArgumentError("write_grid_binary: grid shape does not match the shift/rotation grids");
  }
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  out << kGridMagic << '\n'
      << "engine " << (grid.engine.empty() ? "-" : grid.engine) << '\n'
      << "layout " << layout_name(tgrid.layout) << '\n'
      << "D " << format_exact(tgrid.D) << '\n'
      << "spacing " << format_exact(tgrid.spacing) << '\n'
      << "N " << grid.shifts() << '\n'
      << "ngamma " << grid.rotations() << '\n'
      << "imag " << format_exact(grid.imag_residual) << '\n'
      << "END\n";
  write_doubles(out, tgrid.x.data(), tgrid.x.size());
  write_doubles(out, tgrid.y.data(), tgrid.y.size());
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = grid.values;
  write_doubles(out, rows.data(), static_cast<std::size_t>(rows.size()));
  if (!out) throw IoError("write failed for " + file.string());
}

InnerProductGrid read_grid_binary(const std::filesystem::path& file, TranslationGrid* tgrid,
                                  RotationGrid* rgrid) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  std::string line;
  std::getline(in, line);
  if (line != kGridMagic) throw IoError("grid file: bad header in " + file.string());
  InnerProductGrid grid;
  TranslationGrid t;
  int N = -1, ng = -1;
  while (std::getline(in, line) && line != "END") {
    std::istringstream ss(line);
    std::string key, value;
    ss >> key >> value;
    if (key == "engine") grid.engine = value == "-" ? "" : value;
    else if (key == "layout") t.layout = parse_layout(value);
    else if (key == "D") t.D = std::stod(value);
    else if (key == "spacing") t.spacing = std::stod(value);
    else if (key == "N") N = std::stoi(value);
    else if (key == "ngamma") ng = std::stoi(value);
    else if (key == "imag") grid.imag_residual = std::stod(value);
  }
  if (line != "END" || N < 1 || ng < 1) throw IoError("grid file: malformed header in " + file.string());
  t.x.resize(N);
  t.y.resize(N);
  read_doubles(in, t.x.data(), t.x.size());
  read_doubles(in, t.y.data(), t.y.size());
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows(N, ng);
  read_doubles(in, rows.data(), static_cast<std::size_t>(rows.size()));
  grid.values = rows;
  if (tgrid) *tgrid = std::move(t);
  if (rgrid) *rgrid = RotationGrid(ng);
  return grid;
}

}  // namespace ftk
