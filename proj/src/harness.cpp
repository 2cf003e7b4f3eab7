#include "ftk/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "ftk/errors.hpp"
#include "ftk/interpolation.hpp"

namespace ftk {
namespace {

constexpr double kPi = std::numbers::pi;
namespace fs = std::filesystem;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Platform-independent uniform draws (the std distributions are not).
struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  double uniform() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }
  std::uint64_t next() { return engine(); }
};

std::string numbered(const char* stem, int i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03d.f64", stem, i);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

std::ofstream open_out(const fs::path& file) {
  if (file.has_parent_path()) ensure_dir(file.parent_path());
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, const fs::path& file) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw IoError(file.string() + ": bad number '" + s + "'");
  return v;
}

int to_int(const std::string& s, const fs::path& file) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw IoError(file.string() + ": bad integer '" + s + "'");
  return v;
}

std::vector<std::vector<std::string>> read_csv_rows(const fs::path& file, const std::string& header) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot read " + file.string());
  std::string line;
  if (!std::getline(in, line) || line != header) throw IoError(file.string() + ": unexpected header");
  const std::size_t columns = split_csv(header).size();
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != columns) throw IoError(file.string() + ": wrong column count");
    rows.push_back(std::move(cells));
  }
  return rows;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Decomposed inputs shared by the engines.
struct Prepared {
  RulePtr rule;
  int Q = 0;
  std::vector<PolarFourierSamples> image_polar;
  std::vector<FourierBesselCoeffs> image_coeffs, template_coeffs;
};

Prepared prepare(const RunConfig& config, const Dataset& data) {
  Prepared p;
  p.rule = std::make_shared<const QuadratureRule>(gauss_jacobi_rule(default_radial_count(config.n), config.K()));
  p.Q = config.Q();
  for (const auto& im : data.images) {
    p.image_polar.push_back(polar_fourier(im, p.rule, p.Q));
    p.image_coeffs.push_back(fb_decompose(p.image_polar.back()));
  }
  for (const auto& t : data.templates) p.template_coeffs.push_back(fb_decompose(polar_fourier(t, p.rule, p.Q)));
  return p;
}

int bfr_padding(const RunConfig& config) {
  const double inv = 1.0 / config.spacing_pixels();
  const int pad = static_cast<int>(std::lround(inv));
  if (pad < 1 || std::abs(inv - pad) > 1e-9) {
    throw ArgumentError("engine bfr needs a shift spacing of 1/p pixels for integer p (got " + config.spacing + ")");
  }
  return pad;
}

void run_engine(EngineKind engine, const RunConfig& config, const Prepared& p, const Dataset& data,
                std::span<const int> images, std::span<const int> templates, const TranslationKernelSVD* svd,
                const TranslationGrid& tgrid, const RotationGrid& rgrid, const PairSink& sink, EngineTiming* timing) {
  std::vector<PolarFourierSamples> ip;
  std::vector<FourierBesselCoeffs> ic, tc;
  std::vector<PixelImage> ipx, tpx;
  for (int i : images) {
    if (engine == EngineKind::Bft) ip.push_back(p.image_polar[i]);
    if (engine == EngineKind::Ftk) ic.push_back(p.image_coeffs[i]);
    if (engine == EngineKind::Bfr) ipx.push_back(data.images[i]);
  }
  for (int t : templates) {
    if (engine == EngineKind::Bfr) tpx.push_back(data.templates[t]);
    else tc.push_back(p.template_coeffs[t]);
  }
  const PairSink mapped = [&](int i, int t, InnerProductGrid&& g) { sink(images[i], templates[t], std::move(g)); };
  switch (engine) {
    case EngineKind::Bft:
      bft_align_batch(ip, tc, tgrid, rgrid, mapped, timing, config.threads);
      break;
    case EngineKind::Ftk:
      if (!svd) throw ArgumentError("engine ftk needs a plan");
      ftk_align_batch(ic, tc, *svd, tgrid, rgrid, mapped, timing, -1, config.threads);
      break;
    case EngineKind::Bfr:
      bfr_align_batch(ipx, tpx, rgrid, bfr_padding(config), tgrid.D, mapped, timing, config.threads);
      break;
  }
}

std::vector<int> iota(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}

std::string csv_optional(const std::optional<double>& v) { return v ? format_exact(*v) : std::string(); }

}  // namespace

// ---------------------------------------------------------------- config

const char* engine_name(EngineKind e) {
  switch (e) {
    case EngineKind::Ftk:
      return "ftk";
    case EngineKind::Bft:
      return "bft";
    case EngineKind::Bfr:
      return "bfr";
  }
  return "?";
}

EngineKind parse_engine(const std::string& s) {
  if (s == "ftk") return EngineKind::Ftk;
  if (s == "bft") return EngineKind::Bft;
  if (s == "bfr") return EngineKind::Bfr;
  throw ArgumentError("unknown engine '" + s + "' (expected ftk, bft or bfr)");
}

double RunConfig::spacing_pixels() const {
  if (spacing == "half") return 0.5;
  if (spacing == "quarter") return 0.25;
  double v = 0.0;
  const auto [p, ec] = std::from_chars(spacing.data(), spacing.data() + spacing.size(), v);
  if (ec != std::errc() || p != spacing.data() + spacing.size() || !(v > 0.0) || !std::isfinite(v)) {
    throw ArgumentError("--spacing must be half, quarter or a positive pitch in pixels (got '" + spacing + "')");
  }
  return v;
}

fs::path RunConfig::plan_dir() const { return plan_cache.empty() ? out / "plans" : plan_cache; }

void RunConfig::validate() const {
  if (n < 8 || n % 2 != 0) throw ArgumentError("--n must be even and at least 8");
  if (!(W >= 0.0) || W > 32.0) throw ArgumentError("--W must lie in [0, 32]");
  if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("--eps must lie in (0, 1)");
  (void)spacing_pixels();
  if (ngamma < 0) throw ArgumentError("--ngamma must be positive (0 selects 2Q)");
  if (nim < 1) throw ArgumentError("--nim must be at least 1");
  if (threads < 1) throw ArgumentError("--threads must be at least 1");
}

// ---------------------------------------------------------------- gen

Dataset generate_dataset(const RunConfig& config) {
  config.validate();
  Rng rng(config.seed);
  Dataset d;
  for (int t = 0; t < config.nim; ++t) d.templates.push_back(gen_gaussian_blobs(rng.next(), config.n));
  std::vector<int> perm = iota(config.nim);
  for (int i = config.nim - 1; i > 0; --i) std::swap(perm[i], perm[rng.next() % (i + 1)]);
  // Ground truth on the search grids, so the nearest grid transform is exact.
  const TranslationGrid tgrid = config_translation_grid(config);
  const RotationGrid rgrid(config.rotations());
  for (int i = 0; i < config.nim; ++i) {
    const int j = static_cast<int>(rng.next() % tgrid.size());
    const int r = static_cast<int>(rng.next() % rgrid.count);
    const RigidTransform t{tgrid.x[j], tgrid.y[j], rgrid.angle(r)};
    d.manifest.push_back({i, perm[i], t});
    d.images.push_back(transform_image(d.templates[perm[i]], t));
  }
  return d;
}

void cmd_gen(const RunConfig& config, std::ostream& log) {
  const auto t0 = Clock::now();
  const Dataset d = generate_dataset(config);
  ensure_dir(config.out);
  for (int t = 0; t < config.nim; ++t) write_image(config.out / "templates" / numbered("template", t), d.templates[t]);
  for (int i = 0; i < config.nim; ++i) write_image(config.out / "images" / numbered("image", i), d.images[i]);
  write_manifest(config.out / "manifest.csv", d.manifest);
  write_descriptor(config.out / "dataset.txt", {{"n", std::to_string(config.n)},
                                                {"W", format_exact(config.W)},
                                                {"D", format_exact(config.D())},
                                                {"nim", std::to_string(config.nim)},
                                                {"seed", std::to_string(config.seed)}});
  log << "wrote " << config.nim << " templates and images to " << config.out.string() << " (D = " << config.D()
      << ", " << seconds_since(t0) << " s)\n";
}

Dataset load_dataset(const fs::path& dir) {
  const Descriptor desc = read_descriptor(dir / "dataset.txt");
  const auto it = desc.find("nim");
  if (it == desc.end()) throw IoError((dir / "dataset.txt").string() + ": missing nim");
  const int nim = to_int(it->second, dir / "dataset.txt");
  Dataset d;
  d.manifest = read_manifest(dir / "manifest.csv");
  if (static_cast<int>(d.manifest.size()) != nim) throw IoError("manifest does not list " + std::to_string(nim) + " images");
  for (int t = 0; t < nim; ++t) d.templates.push_back(read_image(dir / "templates" / numbered("template", t)));
  for (int i = 0; i < nim; ++i) d.images.push_back(read_image(dir / "images" / numbered("image", i)));
  for (const auto& e : d.manifest) {
    if (e.template_id < 0 || e.template_id >= nim || e.image_id < 0 || e.image_id >= nim) {
      throw IoError("manifest refers to a missing image or template");
    }
  }
  return d;
}

// ---------------------------------------------------------------- plan

PlanReport cmd_plan(const RunConfig& config, std::ostream& log) {
  config.validate();
  if (!(config.W > 0.0)) throw ArgumentError("plan needs --W > 0");
  const auto t0 = Clock::now();
  PlanReport r;
  r.svd = load_or_build_plan(config.plan_dir(), config.W, config.K(), config.eps, 0, &r.cache_hit);
  r.file = plan_cache_file(config.plan_dir(), config.W, config.K(), config.eps, r.svd.P);
  log << (r.cache_hit ? "plan cache hit: " : "built plan: ") << r.file.string() << " (" << seconds_since(t0)
      << " s)\n";
  log << "W = " << r.svd.W << ", D = " << r.svd.D << ", K = " << r.svd.K << ", eps = " << r.svd.eps
      << ", P = " << r.svd.P << "\n";
  log << "H = " << r.svd.rank() << "\nH_l:";
  for (int l = 0; l <= r.svd.max_order(); ++l) {
    if (r.svd.modal_rank(l) == 0) break;
    log << ' ' << r.svd.modal_rank(l);
  }
  log << "\nHS error = " << hs_error(r.svd, r.svd.rank()) << " (relative "
      << hs_error(r.svd, r.svd.rank()) / (kPi * r.svd.D * r.svd.K) << ")\n";
  return r;
}

// ---------------------------------------------------------------- align

int AlignReport::matched() const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const AlignmentRow& r) { return r.transform_ok; }));
}

GridTruth expected_grid_argmax(const RigidTransform& t, const TranslationGrid& tgrid, const RotationGrid& rgrid) {
  GridTruth g;
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < tgrid.size(); ++j) {
    const double d = std::hypot(tgrid.x[j] + t.shift_x, tgrid.y[j] + t.shift_y);
    if (d < best) {
      best = d;
      g.shift = j;
    }
  }
  const double step = 2.0 * kPi / rgrid.count;
  const long r = std::lround(-t.gamma / step);
  g.rotation = static_cast<int>(((r % rgrid.count) + rgrid.count) % rgrid.count);
  return g;
}

TranslationGrid config_translation_grid(const RunConfig& config) {
  return make_translation_grid(config.D(), config.shift_spacing());
}

AlignReport align_dataset(const RunConfig& config, const Dataset& data, const TranslationKernelSVD* svd) {
  config.validate();
  const int nim = static_cast<int>(data.images.size());
  const int ntemp = static_cast<int>(data.templates.size());
  const Prepared p = prepare(config, data);
  const TranslationGrid tgrid = config_translation_grid(config);
  const RotationGrid rgrid(config.rotations());

  struct Best {
    int tmpl = -1;
    Alignment a;
  };
  std::vector<Best> best(nim);
  const PairSink sink = [&](int i, int t, InnerProductGrid&& g) {
    const Alignment a = argmax_alignment(g);
    if (best[i].tmpl < 0 || a.value > best[i].a.value || (a.value == best[i].a.value && t < best[i].tmpl)) {
      best[i] = {t, a};
    }
  };
  AlignReport report;
  report.shifts = tgrid.size();
  report.H = svd ? svd->rank() : 0;
  const auto images = iota(nim), templates = iota(ntemp);
  run_engine(config.engine, config, p, data, images, templates, svd, tgrid, rgrid, sink, &report.timing);

  for (const auto& e : data.manifest) {
    const Best& b = best[e.image_id];
    AlignmentRow row;
    row.image_id = e.image_id;
    row.true_template = e.template_id;
    row.best_template = b.tmpl;
    row.shift_x = tgrid.x[b.a.shift];
    row.shift_y = tgrid.y[b.a.shift];
    row.gamma = rgrid.angle(b.a.rotation);
    row.value = b.a.value;
    row.template_ok = b.tmpl == e.template_id;
    const GridTruth truth = expected_grid_argmax(e.transform, tgrid, rgrid);
    row.transform_ok = row.template_ok && truth.shift == b.a.shift && truth.rotation == b.a.rotation;
    report.rows.push_back(row);
  }
  return report;
}

AlignReport cmd_align(const RunConfig& config, std::ostream& log) {
  config.validate();
  const Dataset data = load_dataset(config.out);
  const Descriptor desc = read_descriptor(config.out / "dataset.txt");
  if (desc.at("n") != std::to_string(config.n)) {
    throw ArgumentError("dataset in " + config.out.string() + " has n = " + desc.at("n") + " but --n is " +
                        std::to_string(config.n));
  }
  TranslationKernelSVD svd;
  if (config.engine == EngineKind::Ftk) {
    const fs::path file =
        plan_cache_file(config.plan_dir(), config.W, config.K(), config.eps, default_basis_size(config.W));
    if (!fs::exists(file)) {
      throw ArgumentError("no FTK plan for W = " + format_exact(config.W) + ", eps = " + format_exact(config.eps) +
                          " in " + config.plan_dir().string() +
                          "; run 'ftk plan' with the same --n, --W, --eps and --plan-cache first");
    }
    svd = load_plan(file);
  }
  const AlignReport r = align_dataset(config, data, config.engine == EngineKind::Ftk ? &svd : nullptr);
  const fs::path table = config.out / (std::string("alignments_") + engine_name(config.engine) + ".csv");
  write_alignments(table, r.rows);

  // Landscape of the winning template for each image.
  const Prepared p = prepare(config, data);
  const TranslationGrid tgrid = config_translation_grid(config);
  const RotationGrid rgrid(config.rotations());
  const fs::path grid_dir = config.out / (std::string("grids_") + engine_name(config.engine));
  ensure_dir(grid_dir);
  for (const auto& row : r.rows) {
    const std::vector<int> im{row.image_id}, tm{row.best_template};
    run_engine(config.engine, config, p, data, im, tm, config.engine == EngineKind::Ftk ? &svd : nullptr, tgrid,
               rgrid,
               [&](int i, int, InnerProductGrid&& g) {
                 char name[64];
                 std::snprintf(name, sizeof name, "image_%03d.grid", i);
                 write_grid_binary(grid_dir / name, g, tgrid, rgrid);
               },
               nullptr);
  }
  log << engine_name(config.engine) << ": " << data.images.size() << " x " << data.templates.size()
      << " pairs, N = " << r.shifts << ", n_gamma = " << rgrid.count;
  if (config.engine == EngineKind::Ftk) log << ", H = " << r.H;
  log << "\nprecompute " << r.timing.precompute_seconds << " s, pair loop " << r.timing.pair_seconds << " s\n";
  int templates_ok = 0;
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    const AlignmentRow& row = r.rows[k];
    templates_ok += row.template_ok;
    if (row.transform_ok) continue;
    const GridTruth truth = expected_grid_argmax(data.manifest[k].transform, tgrid, rgrid);
    log << "mismatch: image " << row.image_id << " -> template " << row.best_template << " at (" << row.shift_x
        << ", " << row.shift_y << "), gamma " << row.gamma << "; expected template " << row.true_template << " at ("
        << tgrid.x[truth.shift] << ", " << tgrid.y[truth.shift] << "), gamma " << rgrid.angle(truth.rotation) << "\n";
  }
  log << "template matches " << templates_ok << "/" << r.rows.size() << ", grid transform matches " << r.matched()
      << "/" << r.rows.size() << "\nwrote " << table.string() << "\n";
  return r;
}

void write_alignments(const fs::path& file, const std::vector<AlignmentRow>& rows) {
  auto out = open_out(file);
  out << "image_id,true_template,best_template,shift_x,shift_y,gamma,value,template_ok,transform_ok\n";
  for (const auto& r : rows) {
    out << r.image_id << ',' << r.true_template << ',' << r.best_template << ',' << format_exact(r.shift_x) << ','
        << format_exact(r.shift_y) << ',' << format_exact(r.gamma) << ',' << format_exact(r.value) << ','
        << r.template_ok << ',' << r.transform_ok << '\n';
  }
  if (!out) throw IoError("failed writing " + file.string());
}

std::vector<AlignmentRow> read_alignments(const fs::path& file) {
  std::vector<AlignmentRow> rows;
  for (const auto& c : read_csv_rows(
           file, "image_id,true_template,best_template,shift_x,shift_y,gamma,value,template_ok,transform_ok")) {
    AlignmentRow r;
    r.image_id = to_int(c[0], file);
    r.true_template = to_int(c[1], file);
    r.best_template = to_int(c[2], file);
    r.shift_x = to_double(c[3], file);
    r.shift_y = to_double(c[4], file);
    r.gamma = to_double(c[5], file);
    r.value = to_double(c[6], file);
    r.template_ok = to_int(c[7], file) != 0;
    r.transform_ok = to_int(c[8], file) != 0;
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------- bench

std::vector<BenchRecord> run_bench(const RunConfig& config, const BenchOptions& options, const TranslationKernelSVD& svd,
                                   std::ostream& log) {
  config.validate();
  if (options.repeats < 1) throw ArgumentError("bench needs at least one repeat");
  if (options.engines.empty()) throw ArgumentError("bench needs at least one engine");
  const Dataset data = generate_dataset(config);
  const Prepared p = prepare(config, data);
  const RotationGrid rgrid(config.rotations());
  const int nim = config.nim;
  const auto all = iota(nim);

  // BFT runs first so that its first repeat is the reference.
  std::vector<EngineKind> engines{EngineKind::Bft};
  for (EngineKind e : options.engines)
    if (e != EngineKind::Bft) engines.push_back(e);
  const bool time_bft = std::find(options.engines.begin(), options.engines.end(), EngineKind::Bft) != options.engines.end();

  // (image, template) batches per engine; BFR gets a few matching pairs, one call each.
  auto batches = [&](EngineKind e) {
    std::vector<std::pair<std::vector<int>, std::vector<int>>> out;
    if (e != EngineKind::Bfr) {
      out.emplace_back(all, all);
    } else {
      for (int i = 0; i < std::min(std::max(options.bfr_pairs, 1), nim); ++i)
        out.push_back({{i}, {data.manifest[i].template_id}});
    }
    return out;
  };

  {
    const TranslationGrid warm = make_translation_grid(options.fractions.front() * svd.D, config.shift_spacing());
    const std::vector<int> one{0};
    for (EngineKind e : engines)
      run_engine(e, config, p, data, one, one, &svd, warm, rgrid, [](int, int, InnerProductGrid&&) {}, nullptr);
  }

  std::vector<BenchRecord> records;
  for (double f : options.fractions) {
    const double D = f * svd.D;
    const TranslationGrid tgrid = make_translation_grid(D, config.shift_spacing());
    std::map<std::pair<int, int>, Eigen::MatrixXd> reference;
    std::map<std::pair<int, int>, Alignment> reference_argmax;
    for (EngineKind engine : engines) {
      const bool bfr = engine == EngineKind::Bfr;
      const bool is_reference = engine == EngineKind::Bft;
      const auto work = batches(engine);
      int pairs = 0;
      for (const auto& [im, tm] : work) pairs += static_cast<int>(im.size() * tm.size());

      BenchRecord rec;
      rec.engine = engine_name(engine);
      rec.n = config.n;
      rec.W = svd.W;
      rec.D = D;
      rec.eps = svd.eps;
      rec.H = engine == EngineKind::Ftk ? svd.rank() : 0;
      rec.ngamma = rgrid.count;
      rec.pairs = pairs;

      double diff2 = 0.0, ref2 = 0.0, diff_max = 0.0, ref_max = 0.0;
      bool consistent = true;
      bool certificate_ok = true;
      const TranslationGrid own_grid = bfr ? make_translation_grid(D, config.dx() / bfr_padding(config)) : tgrid;
      const std::vector<int> to_ref = match_shifts(own_grid, tgrid, config.shift_spacing() / 100);
      rec.N = own_grid.size();
      std::vector<double> pre, loop;
      const int repeats = is_reference && !time_bft ? 1 : options.repeats;
      for (int rep = 0; rep < repeats; ++rep) {
        const PairSink check = [&](int i, int t, InnerProductGrid&& g) {
          if (rep > 0) return;
          if (is_reference) {
            reference_argmax[{i, t}] = argmax_alignment(g);
            reference[{i, t}] = std::move(g.values);
            return;
          }
          const Eigen::MatrixXd& ref = reference.at({i, t});
          double pair_diff2 = 0.0;
          int common = 0;
          for (int j = 0; j < g.shifts(); ++j) {
            if (to_ref[j] < 0) continue;
            ++common;
            const auto d = (g.values.row(j) - ref.row(to_ref[j])).eval();
            pair_diff2 += d.squaredNorm();
            ref2 += ref.row(to_ref[j]).squaredNorm();
            diff_max = std::max(diff_max, d.cwiseAbs().maxCoeff());
            ref_max = std::max(ref_max, ref.row(to_ref[j]).cwiseAbs().maxCoeff());
          }
          diff2 += pair_diff2;
          const Alignment a = argmax_alignment(g);
          const Alignment r = reference_argmax.at({i, t});
          if (to_ref[a.shift] != r.shift || a.rotation != r.rotation) consistent = false;
          if (engine == EngineKind::Ftk && common > 0) {
            const double pair_rms = std::sqrt(pair_diff2 / (static_cast<double>(common) * g.rotations()));
            if (pair_rms > x_error_bound(svd, svd.rank(), p.image_coeffs[i], p.template_coeffs[t])) certificate_ok = false;
          }
        };
        double pre_total = 0.0, loop_total = 0.0;
        int images_seen = 0;
        for (const auto& [im, tm] : work) {
          EngineTiming timing;
          run_engine(engine, config, p, data, im, tm, &svd, tgrid, rgrid, check, &timing);
          pre_total += timing.precompute_seconds;
          loop_total += timing.pair_seconds;
          images_seen += static_cast<int>(im.size());
        }
        pre.push_back(pre_total / images_seen);
        loop.push_back(loop_total / pairs);
      }
      if (!certificate_ok) {
        throw NumericalError("FTK error exceeded its certified bound at D = " + format_exact(D));
      }
      rec.precompute_seconds = median(pre);
      rec.pair_seconds = median(loop);
      if (is_reference) {
        rec.rms_error = 0.0;
        rec.max_error = 0.0;
        rec.consistent = true;
      } else {
        rec.rms_error = ref2 > 0.0 ? std::sqrt(diff2 / ref2) : 0.0;
        rec.max_error = ref_max > 0.0 ? diff_max / ref_max : 0.0;
        rec.consistent = consistent;
      }
      if (is_reference && !time_bft) continue;
      log << rec.engine << " D=" << D << " N=" << rec.N << " pairs=" << pairs << " pre/img=" << rec.precompute_seconds
          << " s pair=" << rec.pair_seconds << " s rms=" << *rec.rms_error << (consistent ? "" : " ARGMAX-DIFF")
          << "\n";
      records.push_back(rec);
    }
  }
  return records;
}

std::vector<BenchRecord> cmd_bench(const RunConfig& config, std::ostream& log) {
  config.validate();
  PlanReport plan = cmd_plan(config, log);
  const auto records = run_bench(config, BenchOptions{}, plan.svd, log);
  const fs::path file = config.out / "bench.csv";
  write_bench_csv(file, records);
  log << "wrote " << file.string() << "\n";
  return records;
}

namespace {
const char* kBenchHeader =
    "engine,n,W,D,eps,H,N,ngamma,pairs,precompute_seconds,pair_seconds,rms_error,max_error,consistent";
}

void write_bench_csv(const fs::path& file, const std::vector<BenchRecord>& records) {
  auto out = open_out(file);
  out << kBenchHeader << '\n';
  for (const auto& r : records) {
    out << r.engine << ',' << r.n << ',' << format_exact(r.W) << ',' << format_exact(r.D) << ',' << format_exact(r.eps)
        << ',' << r.H << ',' << r.N << ',' << r.ngamma << ',' << r.pairs << ',' << format_exact(r.precompute_seconds)
        << ',' << format_exact(r.pair_seconds) << ',' << csv_optional(r.rms_error) << ','
        << csv_optional(r.max_error) << ',' << (r.consistent ? (*r.consistent ? "1" : "0") : "") << '\n';
  }
  if (!out) throw IoError("failed writing " + file.string());
}

std::vector<BenchRecord> read_bench_csv(const fs::path& file) {
  std::vector<BenchRecord> out;
  for (const auto& c : read_csv_rows(file, kBenchHeader)) {
    BenchRecord r;
    r.engine = c[0];
    r.n = to_int(c[1], file);
    r.W = to_double(c[2], file);
    r.D = to_double(c[3], file);
    r.eps = to_double(c[4], file);
    r.H = to_int(c[5], file);
    r.N = to_int(c[6], file);
    r.ngamma = to_int(c[7], file);
    r.pairs = to_int(c[8], file);
    r.precompute_seconds = to_double(c[9], file);
    r.pair_seconds = to_double(c[10], file);
    if (!c[11].empty()) r.rms_error = to_double(c[11], file);
    if (!c[12].empty()) r.max_error = to_double(c[12], file);
    if (!c[13].empty()) r.consistent = to_int(c[13], file) != 0;
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------- accuracy

NodeRatio node_ratio(double W, double K, double target) {
  // eps well below the target so that every term above it is computed.
  const TranslationKernelSVD svd = assemble_svd(W, K, target * 1e-2);
  const double norm = kPi * svd.D * svd.K;
  NodeRatio r;
  r.W = W;
  r.target = target;
  while (r.ftk_terms < static_cast<int>(svd.all_terms.size()) && hs_error(svd, r.ftk_terms) > target * norm) {
    ++r.ftk_terms;
  }
  r.linear_nodes = bilinear_nodes_for_error(svd.D, K, target * norm);
  return r;
}

AccuracyReport accuracy_report(int n, const std::vector<double>& Ws, double target, double profile_W,
                               const std::vector<double>& profile_eps) {
  const double K = nyquist_frequency(n);
  AccuracyReport rep;
  for (double W : Ws) {
    const TranslationKernelSVD svd = assemble_svd(W, K, 1e-5);
    const double norm = kPi * svd.D * K;
    for (int H = 1; H <= static_cast<int>(svd.all_terms.size()); ++H) {
      const double e = hs_error(svd, H);
      rep.hs.push_back({"ftk", W, H, e, e / norm});
      if (e / norm < 1e-4) break;
    }
    for (int m = 1; m <= 24; ++m) {
      const double h = svd.D / m;
      const double e = bilinear_hs_error(svd.D, h, K);
      rep.hs.push_back({"linear", W, bilinear_nodes(svd.D, h).size(), e, e / norm});
    }
    rep.ratios.push_back(node_ratio(W, K, target));
  }

  const TranslationKernelSVD svd = assemble_svd(profile_W, K, *std::min_element(profile_eps.begin(), profile_eps.end()) * 1e-2);
  const double D = svd.D;
  constexpr int kSamples = 100;
  for (double eps : profile_eps) {
    int H = 0;
    while (H < static_cast<int>(svd.all_terms.size()) && svd.all_terms[H].sigma > eps) ++H;
    const double h = bilinear_pitch_for_nodes(D, H);
    const int nodes = bilinear_nodes(D, h).size();
    Flatness ftk{"ftk", H, 0.0, std::numeric_limits<double>::infinity()};
    Flatness lin{"linear", nodes, 0.0, std::numeric_limits<double>::infinity()};
    for (int i = 0; i <= kSamples; ++i) {
      const double delta = D * i / kSamples;
      const double ef = ftk_shift_error(svd, H, delta);
      const double el = bilinear_shift_error(D, h, K, delta, 0.0);
      rep.profile.push_back({"ftk", H, delta, delta * K / (2 * kPi), ef});
      rep.profile.push_back({"linear", nodes, delta, delta * K / (2 * kPi), el});
      if (i * 10 >= kSamples) {
        ftk.max_error = std::max(ftk.max_error, ef);
        ftk.min_error = std::min(ftk.min_error, ef);
        lin.max_error = std::max(lin.max_error, el);
        lin.min_error = std::min(lin.min_error, el);
      }
    }
    rep.flatness.push_back(ftk);
    rep.flatness.push_back(lin);
  }
  return rep;
}

AccuracyReport cmd_accuracy(const RunConfig& config, std::ostream& log) {
  config.validate();
  const auto t0 = Clock::now();
  const AccuracyReport rep = accuracy_report(config.n, {1.0, 2.0, 3.0}, config.eps, 2.0, {1e-1, 1e-2, 1e-3, 1e-4});
  {
    auto out = open_out(config.out / "hs_error.csv");
    out << "method,W,count,hs_error,relative\n";
    for (const auto& p : rep.hs)
      out << p.method << ',' << format_exact(p.W) << ',' << p.count << ',' << format_exact(p.error) << ','
          << format_exact(p.relative) << '\n';
  }
  {
    auto out = open_out(config.out / "node_ratio.csv");
    out << "W,target,ftk_terms,linear_nodes,ratio\n";
    for (const auto& r : rep.ratios) {
      out << format_exact(r.W) << ',' << format_exact(r.target) << ',' << r.ftk_terms << ',' << r.linear_nodes << ','
          << format_exact(r.ratio()) << '\n';
      log << "W = " << r.W << ": FTK H = " << r.ftk_terms << ", bilinear nodes = " << r.linear_nodes
          << ", ratio = " << r.ratio() << "\n";
    }
  }
  {
    auto out = open_out(config.out / "shift_error.csv");
    out << "method,count,delta,wavelengths,error\n";
    for (const auto& p : rep.profile)
      out << p.method << ',' << p.count << ',' << format_exact(p.delta) << ',' << format_exact(p.wavelengths) << ','
          << format_exact(p.error) << '\n';
  }
  {
    auto out = open_out(config.out / "flatness.csv");
    out << "method,count,max_error,min_error,ratio\n";
    for (const auto& f : rep.flatness) {
      out << f.method << ',' << f.count << ',' << format_exact(f.max_error) << ',' << format_exact(f.min_error) << ','
          << format_exact(f.ratio()) << '\n';
      log << f.method << " (" << f.count << "): max/min error over [0.1D, D] = " << f.ratio() << "\n";
    }
  }
  log << "wrote hs_error.csv, node_ratio.csv, shift_error.csv, flatness.csv to " << config.out.string() << " ("
      << seconds_since(t0) << " s)\n";
  return rep;
}

// ---------------------------------------------------------------- svd-report

void write_svd_report(const fs::path& file, const TranslationKernelSVD& svd) {
  auto out = open_out(file);
  out << "ell,eta,sigma,kept\n";
  for (std::size_t z = 0; z < svd.all_terms.size(); ++z) {
    const SvdTerm& t = svd.all_terms[z];
    out << t.ell << ',' << t.eta << ',' << format_exact(t.sigma) << ',' << (static_cast<int>(z) < svd.rank()) << '\n';
  }
  if (!out) throw IoError("failed writing " + file.string());
}

void cmd_svd_report(const RunConfig& config, std::ostream& log) {
  const PlanReport plan = cmd_plan(config, log);
  const fs::path file = config.out / "svd_report.csv";
  write_svd_report(file, plan.svd);
  log << "wrote " << plan.svd.all_terms.size() << " singular values to " << file.string() << "\n";
}

}  // namespace ftk
