#include "ltr/io/image.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include "ltr/error.hpp"

namespace ltr::io {

namespace {

struct File {
  std::FILE* f = nullptr;
  ~File() {
    if (f) std::fclose(f);
  }
};

[[noreturn]] void png_fail(png_structp, png_const_charp msg) { throw FormatError(std::string("libpng: ") + msg); }
void png_warn(png_structp, png_const_charp) {}

void write_png(const std::string& path, int width, int height, int bit_depth, int color_type,
               const std::uint8_t* rows, std::size_t row_bytes) {
  File file{std::fopen(path.c_str(), "wb")};
  if (!file.f) throw IoError("cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
  if (!png) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  try {
    png_init_io(png, file.f);
    png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bit_depth == 16) png_set_swap(png);
    for (int y = 0; y < height; ++y)
      png_write_row(png, const_cast<png_bytep>(rows + static_cast<std::size_t>(y) * row_bytes));
    png_write_end(png, nullptr);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
  png_destroy_write_struct(&png, &info);
}

struct Decoded {
  int width = 0, height = 0;
  std::vector<std::uint8_t> bytes;
  int channels = 0;
  int bit_depth = 0;
};

// Expands palette / low bit depths; keeps 16-bit samples in host order.
Decoded read_png(const std::string& path) {
  File file{std::fopen(path.c_str(), "rb")};
  if (!file.f) throw IoError("cannot open " + path);
  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.f) != 8 || png_sig_cmp(sig, 0, 8)) throw FormatError(path + ": not a PNG");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
  if (!png) throw IoError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  Decoded d;
  try {
    png_init_io(png, file.f);
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (depth == 16) png_set_swap(png);
    png_read_update_info(png, info);
    d.width = static_cast<int>(png_get_image_width(png, info));
    d.height = static_cast<int>(png_get_image_height(png, info));
    d.channels = png_get_channels(png, info);
    d.bit_depth = png_get_bit_depth(png, info);
    const std::size_t row_bytes = png_get_rowbytes(png, info);
    d.bytes.resize(row_bytes * d.height);
    std::vector<png_bytep> rows(d.height);
    for (int y = 0; y < d.height; ++y) rows[y] = d.bytes.data() + static_cast<std::size_t>(y) * row_bytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return d;
}

}  // namespace

void write_png16(const std::string& path, const Image16& img) {
  if (img.data.size() != static_cast<std::size_t>(img.width) * img.height)
    throw InvalidArgument("image buffer size mismatch");
  write_png(path, img.width, img.height, 16, PNG_COLOR_TYPE_GRAY,
            reinterpret_cast<const std::uint8_t*>(img.data.data()), static_cast<std::size_t>(img.width) * 2);
}

Image16 read_png16(const std::string& path) {
  Decoded d = read_png(path);
  if (d.channels != 1 || d.bit_depth != 16) throw FormatError(path + ": expected 16-bit grayscale PNG");
  Image16 img{d.width, d.height, std::vector<std::uint16_t>(static_cast<std::size_t>(d.width) * d.height)};
  std::memcpy(img.data.data(), d.bytes.data(), img.data.size() * 2);
  return img;
}

void write_png_rgb(const std::string& path, const ImageRgb8& img) {
  if (img.data.size() != static_cast<std::size_t>(img.width) * img.height * 3)
    throw InvalidArgument("image buffer size mismatch");
  write_png(path, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, img.data.data(),
            static_cast<std::size_t>(img.width) * 3);
}

ImageRgb8 read_png_rgb(const std::string& path) {
  Decoded d = read_png(path);
  ImageRgb8 img{d.width, d.height, std::vector<std::uint8_t>(static_cast<std::size_t>(d.width) * d.height * 3)};
  const int bps = d.bit_depth == 16 ? 2 : 1;
  const std::size_t n = static_cast<std::size_t>(d.width) * d.height;
  auto sample = [&](std::size_t px, int ch) -> std::uint8_t {
    const std::size_t off = (px * d.channels + ch) * bps;
    if (bps == 1) return d.bytes[off];
    std::uint16_t v;
    std::memcpy(&v, &d.bytes[off], 2);
    return static_cast<std::uint8_t>(v >> 8);
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      const int ch = d.channels >= 3 ? c : 0;
      img.data[i * 3 + c] = sample(i, ch);
    }
  }
  return img;
}

ProbabilityMap read_probability_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[4];
  std::uint32_t dims[3];
  if (!in.read(magic, 4) || std::memcmp(magic, "PRB1", 4) != 0) throw FormatError(path + ": bad magic");
  if (!in.read(reinterpret_cast<char*>(dims), sizeof dims)) throw FormatError(path + ": truncated header");
  ProbabilityMap m;
  m.height = static_cast<int>(dims[0]);
  m.width = static_cast<int>(dims[1]);
  m.labels = static_cast<int>(dims[2]);
  m.values.resize(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2]);
  if (!in.read(reinterpret_cast<char*>(m.values.data()), static_cast<std::streamsize>(m.values.size() * 4)))
    throw FormatError(path + ": truncated body");
  return m;
}

void write_probability_map(const std::string& path, const ProbabilityMap& map) {
  if (map.values.size() != static_cast<std::size_t>(map.height) * map.width * map.labels)
    throw InvalidArgument("probability map size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  const std::uint32_t dims[3] = {static_cast<std::uint32_t>(map.height), static_cast<std::uint32_t>(map.width),
                                 static_cast<std::uint32_t>(map.labels)};
  out.write("PRB1", 4);
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  out.write(reinterpret_cast<const char*>(map.values.data()), static_cast<std::streamsize>(map.values.size() * 4));
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace ltr::io
