#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "ftk/errors.hpp"
#include "ftk/kernel_factorization.hpp"

namespace ftk {
namespace {

constexpr const char* kMagic = "ftk-plan 1";

static_assert(std::endian::native == std::endian::little, "plan payload assumes little-endian doubles");

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_block(std::ofstream& out, const double* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
}

void read_block(std::ifstream& in, double* data, std::size_t count) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw IoError("plan cache: truncated payload");
}

}  // namespace

std::filesystem::path plan_cache_file(const std::filesystem::path& dir, double W, double K,
                                      double eps, int P) {
  char name[160];
  std::snprintf(name, sizeof name, "plan_W%.6g_K%.10g_eps%.3e_P%d.ftkplan", W, K, eps, P);
  return dir / name;
}

void save_plan(const std::filesystem::path& file, const TranslationKernelSVD& svd) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("plan cache: cannot write " + file.string());
  out << kMagic << '\n';
  out << "W " << format_double(svd.W) << '\n';
  out << "D " << format_double(svd.D) << '\n';
  out << "K " << format_double(svd.K) << '\n';
  out << "eps " << format_double(svd.eps) << '\n';
  out << "P " << svd.P << '\n';
  out << "L " << svd.max_order() << '\n';
  out << "H " << svd.rank() << '\n';
  out << "H_l";
  for (const auto& m : svd.modes) out << ' ' << m.rank;
  out << "\nEND\n";
  const auto P = static_cast<std::size_t>(svd.P);
  for (const auto& m : svd.modes) {
    write_block(out, m.sigma.data(), P);
    write_block(out, m.u.data(), P * P);
    write_block(out, m.v.data(), P * P);
  }
  if (!out) throw IoError("plan cache: write failed for " + file.string());
}

TranslationKernelSVD load_plan(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("plan cache: cannot open " + file.string());
  std::string line;
  std::getline(in, line);
  if (line != kMagic) throw IoError("plan cache: bad header in " + file.string());

  TranslationKernelSVD svd;
  int lmax = -1;
  std::vector<int> ranks;
  while (std::getline(in, line) && line != "END") {
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "W") ss >> svd.W;
    else if (key == "D") ss >> svd.D;
    else if (key == "K") ss >> svd.K;
    else if (key == "eps") ss >> svd.eps;
    else if (key == "P") ss >> svd.P;
    else if (key == "L") ss >> lmax;
    else if (key == "H_l") {
      int r;
      while (ss >> r) ranks.push_back(r);
    }
  }
  if (line != "END" || svd.P < 1 || lmax < 0 || static_cast<int>(ranks.size()) != lmax + 1) {
    throw IoError("plan cache: malformed header in " + file.string());
  }
  const int P = svd.P;
  for (int l = 0; l <= lmax; ++l) {
    ModalSVD m;
    m.ell = l;
    m.D = svd.D;
    m.K = svd.K;
    m.rank = ranks[l];
    m.sigma.resize(P);
    m.u.resize(P, P);
    m.v.resize(P, P);
    read_block(in, m.sigma.data(), P);
    read_block(in, m.u.data(), static_cast<std::size_t>(P) * P);
    read_block(in, m.v.data(), static_cast<std::size_t>(P) * P);
    svd.modes.push_back(std::move(m));
  }
  svd.finalize();
  return svd;
}

TranslationKernelSVD load_or_build_plan(const std::filesystem::path& dir, double W, double K,
                                        double eps, int P, bool* hit) {
  if (P <= 0) P = default_basis_size(W);
  const auto file = plan_cache_file(dir, W, K, eps, P);
  if (std::filesystem::exists(file)) {
    if (hit) *hit = true;
    return load_plan(file);
  }
  if (hit) *hit = false;
  auto svd = assemble_svd(W, K, eps, P);
  save_plan(file, svd);
  return svd;
}

}  // namespace ftk
