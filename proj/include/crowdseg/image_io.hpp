#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace crowdseg {

// Plain raster buffers used by the file loaders and renderers.
struct Gray8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major
};

struct Gray16 {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> pixels;  // row-major
};

struct Rgb8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, 3 bytes per pixel
};

// Binary PGM (P5). 8-bit readers reject 16-bit files and vice versa.
Gray8 read_pgm8(const std::string& path);
void write_pgm8(const Gray8& img, const std::string& path);

// 16-bit PGM stores samples big-endian with maxval 65535.
Gray16 read_pgm16(const std::string& path);
void write_pgm16(const Gray16& img, const std::string& path);

// 8-bit grayscale PNG (1/2/4-bit gray is expanded, 16-bit is stripped).
Gray8 read_png_gray8(const std::string& path);
void write_png_gray8(const Gray8& img, const std::string& path);
void write_png_rgb8(const Rgb8& img, const std::string& path);

}  // namespace crowdseg
