#include "ftk/image_io.hpp"

#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ftk/errors.hpp"

namespace ftk {

static_assert(std::endian::native == std::endian::little, "image payload assumes little-endian doubles");

namespace {

std::filesystem::path sidecar(const std::filesystem::path& path) {
  auto s = path;
  s += ".txt";
  return s;
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw IoError("cannot parse " + what + ": '" + s + "'");
  return v;
}

int parse_int(const std::string& s, const std::string& what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw IoError("cannot parse " + what + ": '" + s + "'");
  return v;
}

void ensure_parent(const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
}

}  // namespace

std::string format_exact(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_descriptor(const std::filesystem::path& file, const Descriptor& d) {
  ensure_parent(file);
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  for (const auto& [k, v] : d) out << k << '=' << v << '\n';
  if (!out) throw IoError("write failed for " + file.string());
}

Descriptor read_descriptor(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  Descriptor d;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw IoError("malformed descriptor line in " + file.string() + ": " + line);
    d[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return d;
}

void write_image(const std::filesystem::path& path, const PixelImage& image, const Descriptor& extra) {
  image.validate();
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(image.samples.data()),
            static_cast<std::streamsize>(image.samples.size() * sizeof(double)));
  if (!out) throw IoError("write failed for " + path.string());
  Descriptor d = extra;
  d["n"] = std::to_string(image.n);
  d["dx"] = format_exact(image.dx());
  write_descriptor(sidecar(path), d);
}

PixelImage read_image(const std::filesystem::path& path, Descriptor* descriptor) {
  const Descriptor d = read_descriptor(sidecar(path));
  const auto it = d.find("n");
  if (it == d.end()) throw IoError("descriptor without n for " + path.string());
  const int n = parse_int(it->second, "n");
  if (n < 4) throw IoError("bad image size in " + path.string());
  PixelImage image(n);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  in.read(reinterpret_cast<char*>(image.samples.data()),
          static_cast<std::streamsize>(image.samples.size() * sizeof(double)));
  if (!in) throw IoError("truncated image payload in " + path.string());
  in.peek();
  if (!in.eof()) throw IoError("trailing bytes in " + path.string());
  if (descriptor) *descriptor = d;
  return image;
}

void write_manifest(const std::filesystem::path& file, const std::vector<ManifestEntry>& entries) {
  ensure_parent(file);
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out << "image_id,template_id,shift_x,shift_y,gamma\n";
  for (const auto& e : entries) {
    out << e.image_id << ',' << e.template_id << ',' << format_exact(e.transform.shift_x) << ','
        << format_exact(e.transform.shift_y) << ',' << format_exact(e.transform.gamma) << '\n';
  }
  if (!out) throw IoError("write failed for " + file.string());
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  std::string line;
  std::getline(in, line);
  if (line != "image_id,template_id,shift_x,shift_y,gamma") throw IoError("bad manifest header in " + file.string());
  std::vector<ManifestEntry> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 5) throw IoError("bad manifest row: " + line);
    ManifestEntry e;
    e.image_id = parse_int(f[0], "image_id");
    e.template_id = parse_int(f[1], "template_id");
    e.transform.shift_x = parse_double(f[2], "shift_x");
    e.transform.shift_y = parse_double(f[3], "shift_y");
    e.transform.gamma = parse_double(f[4], "gamma");
    out.push_back(e);
  }
  return out;
}

}  // namespace ftk
