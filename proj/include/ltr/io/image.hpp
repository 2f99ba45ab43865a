#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ltr::io {

/// Row-major 16-bit single-channel image.
struct Image16 {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> data;

  std::uint16_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

/// Row-major interleaved 8-bit RGB image.
struct ImageRgb8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // size 3·W·H
};

void write_png16(const std::string& path, const Image16& img);
Image16 read_png16(const std::string& path);
void write_png_rgb(const std::string& path, const ImageRgb8& img);
/// Accepts gray/RGB/RGBA of any bit depth; converted to 8-bit RGB.
ImageRgb8 read_png_rgb(const std::string& path);

/// Dense per-pixel label probabilities, row-major (y, x, s).
struct ProbabilityMap {
  int height = 0;
  int width = 0;
  int labels = 0;
  std::vector<float> values;

  float at(int x, int y, int s) const {
    return values[(static_cast<std::size_t>(y) * width + x) * labels + s];
  }
};

/// "PRB1" magic, uint32 H, W, S (little endian), then H·W·S float32.
ProbabilityMap read_probability_map(const std::string& path);
void write_probability_map(const std::string& path, const ProbabilityMap& map);

}  // namespace ltr::io
