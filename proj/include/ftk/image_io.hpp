#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ftk/fourier_bessel.hpp"

namespace ftk {

/// Free-form key=value pairs written next to an image (n and dx are added
/// automatically).
using Descriptor = std::map<std::string, std::string>;

/// Writes <path> as raw little-endian float64 (row-major) and <path>.txt as
/// the descriptor.
void write_image(const std::filesystem::path& path, const PixelImage& image,
                 const Descriptor& extra = {});
PixelImage read_image(const std::filesystem::path& path, Descriptor* descriptor = nullptr);

Descriptor read_descriptor(const std::filesystem::path& file);
void write_descriptor(const std::filesystem::path& file, const Descriptor& d);

struct ManifestEntry {
  int image_id = 0;
  int template_id = 0;
  RigidTransform transform;
};

void write_manifest(const std::filesystem::path& file, const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& file);

/// Shortest round-trip decimal form.
std::string format_exact(double v);

}  // namespace ftk
