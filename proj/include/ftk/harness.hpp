#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ftk/alignment_engines.hpp"
#include "ftk/image_io.hpp"
#include "ftk/kernel_factorization.hpp"

namespace ftk {

enum class EngineKind { Ftk, Bft, Bfr };

const char* engine_name(EngineKind e);
EngineKind parse_engine(const std::string& s);

struct RunConfig {
  int n = 64;
  double W = 1.0;
  double eps = 1e-2;
  std::string spacing = "quarter";  // half | quarter | shift pitch in pixels
  int ngamma = 0;                   // 0: 2Q
  EngineKind engine = EngineKind::Ftk;
  int nim = 10;
  std::uint64_t seed = 1;
  std::filesystem::path out = "ftk_out";
  int threads = 1;
  std::filesystem::path plan_cache;  // empty: <out>/plans

  [[nodiscard]] double dx() const { return 2.0 / n; }
  [[nodiscard]] double K() const { return nyquist_frequency(n); }
  [[nodiscard]] double D() const { return shift_radius(n, W); }
  [[nodiscard]] int Q() const { return default_angular_order(K()); }
  [[nodiscard]] double spacing_pixels() const;
  [[nodiscard]] double shift_spacing() const { return spacing_pixels() * dx(); }
  [[nodiscard]] int rotations() const { return ngamma > 0 ? ngamma : 2 * Q(); }
  [[nodiscard]] std::filesystem::path plan_dir() const;

  /// Throws ArgumentError on inconsistent or out-of-range values.
  void validate() const;
};

// ---------------------------------------------------------------- gen

struct Dataset {
  std::vector<PixelImage> templates;
  std::vector<PixelImage> images;
  std::vector<ManifestEntry> manifest;  // one entry per image
};

/// Deterministic given the config and seed: unit-norm blob templates, and
/// images that are transformed templates. Shifts are drawn uniformly from
/// the translation grid of the config and angles from its rotation grid.
Dataset generate_dataset(const RunConfig& config);

void cmd_gen(const RunConfig& config, std::ostream& log);
Dataset load_dataset(const std::filesystem::path& dir);

// ---------------------------------------------------------------- plan

struct PlanReport {
  TranslationKernelSVD svd;
  bool cache_hit = false;
  std::filesystem::path file;
};

PlanReport cmd_plan(const RunConfig& config, std::ostream& log);

// ---------------------------------------------------------------- align

struct AlignmentRow {
  int image_id = 0;
  int true_template = 0;
  int best_template = 0;
  double shift_x = 0.0;
  double shift_y = 0.0;
  double gamma = 0.0;
  double value = 0.0;
  bool template_ok = false;
  bool transform_ok = false;  // grid shift and angle nearest to the ground truth
};

struct AlignReport {
  std::vector<AlignmentRow> rows;
  EngineTiming timing;
  int shifts = 0;
  int H = 0;

  [[nodiscard]] int matched() const;
};

/// Grid index of the shift and rotation closest to where the maximum of
/// X(image, template) should sit for the given ground truth.
struct GridTruth {
  int shift = 0;
  int rotation = 0;
};
GridTruth expected_grid_argmax(const RigidTransform& t, const TranslationGrid& tgrid, const RotationGrid& rgrid);

TranslationGrid config_translation_grid(const RunConfig& config);

/// Runs one engine over all image-template pairs of the dataset.
AlignReport align_dataset(const RunConfig& config, const Dataset& data, const TranslationKernelSVD* svd);

/// Reads the dataset in config.out, requires a cached plan for engine=ftk,
/// writes alignments_<engine>.csv and the best grid per image.
AlignReport cmd_align(const RunConfig& config, std::ostream& log);

void write_alignments(const std::filesystem::path& file, const std::vector<AlignmentRow>& rows);
std::vector<AlignmentRow> read_alignments(const std::filesystem::path& file);

// ---------------------------------------------------------------- bench

struct BenchRecord {
  std::string engine;
  int n = 0;
  double W = 0.0;   // plan W
  double D = 0.0;   // shift disk of this sweep point
  double eps = 0.0;
  int H = 0;
  int N = 0;
  int ngamma = 0;
  int pairs = 0;
  double precompute_seconds = 0.0;  // per image
  double pair_seconds = 0.0;        // per pair
  std::optional<double> rms_error;  // relative to the reference RMS
  std::optional<double> max_error;  // relative to the reference max
  std::optional<bool> consistent;   // argmax agrees with the reference for every pair

  bool operator==(const BenchRecord&) const = default;
};

struct BenchOptions {
  std::vector<double> fractions{0.5, 0.6, 0.7, 0.85, 1.0};  // of the plan D
  std::vector<EngineKind> engines{EngineKind::Ftk, EngineKind::Bft, EngineKind::Bfr};
  int repeats = 3;
  int bfr_pairs = 1;  // BFR cost per pair does not depend on N
};

std::vector<BenchRecord> run_bench(const RunConfig& config, const BenchOptions& options, const TranslationKernelSVD& svd,
                                   std::ostream& log);
std::vector<BenchRecord> cmd_bench(const RunConfig& config, std::ostream& log);

void write_bench_csv(const std::filesystem::path& file, const std::vector<BenchRecord>& records);
std::vector<BenchRecord> read_bench_csv(const std::filesystem::path& file);

// ---------------------------------------------------------------- accuracy

struct HsPoint {
  std::string method;  // ftk | linear
  double W = 0.0;
  int count = 0;       // terms or nodes
  double error = 0.0;  // Hilbert-Schmidt, full-kernel units
  double relative = 0.0;
};

struct NodeRatio {
  double W = 0.0;
  double target = 0.0;  // relative Hilbert-Schmidt error
  int ftk_terms = 0;
  int linear_nodes = 0;
  [[nodiscard]] double ratio() const { return static_cast<double>(linear_nodes) / ftk_terms; }
};

struct ShiftErrorPoint {
  std::string method;
  int count = 0;
  double delta = 0.0;
  double wavelengths = 0.0;  // delta K / 2 pi
  double error = 0.0;
};

struct Flatness {
  std::string method;
  int count = 0;
  double max_error = 0.0;
  double min_error = 0.0;
  [[nodiscard]] double ratio() const { return max_error / min_error; }
};

struct AccuracyReport {
  std::vector<HsPoint> hs;
  std::vector<NodeRatio> ratios;
  std::vector<ShiftErrorPoint> profile;
  std::vector<Flatness> flatness;  // over [0.1 D, D]
};

/// Relative HS error is E / (pi D K), the norm of the kernel itself.
NodeRatio node_ratio(double W, double K, double target);

/// Error-vs-shift curves at omega = 0 for the terms of each eps plan and
/// bilinear interpolation with a matched node count.
AccuracyReport accuracy_report(int n, const std::vector<double>& Ws, double target, double profile_W,
                               const std::vector<double>& profile_eps);
AccuracyReport cmd_accuracy(const RunConfig& config, std::ostream& log);

// ---------------------------------------------------------------- svd-report

void write_svd_report(const std::filesystem::path& file, const TranslationKernelSVD& svd);
void cmd_svd_report(const RunConfig& config, std::ostream& log);

}  // namespace ftk
