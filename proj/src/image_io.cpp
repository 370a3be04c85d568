#include "crowdseg/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <fstream>

#include "crowdseg/errors.hpp"

namespace crowdseg {

namespace {

// Reads one whitespace-delimited PGM header token, skipping '#' comments.
int next_pgm_int(std::istream& in, const std::string& path) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  if (c == EOF || !std::isdigit(c)) throw IoError(path + ": malformed PGM header");
  long value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    if (value > 1 << 30) throw IoError(path + ": PGM header value out of range");
    c = in.get();
  }
  return static_cast<int>(value);
}

struct PgmHeader {
  int width;
  int height;
  int maxval;
};

PgmHeader read_pgm_header(std::istream& in, const std::string& path) {
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (m0 != 'P' || m1 != '5') throw IoError(path + ": not a binary PGM (P5) file");
  PgmHeader h;
  h.width = next_pgm_int(in, path);
  h.height = next_pgm_int(in, path);
  h.maxval = next_pgm_int(in, path);
  // exactly one whitespace byte separates the header from the raster
  if (h.width <= 0 || h.height <= 0) throw IoError(path + ": bad PGM dimensions");
  return h;
}

}  // namespace

Gray8 read_pgm8(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open file");
  PgmHeader h = read_pgm_header(in, path);
  if (h.maxval != 255) throw IoError(path + ": expected 8-bit PGM (maxval 255)");
  Gray8 img{h.width, h.height, {}};
  img.pixels.resize(static_cast<size_t>(h.width) * h.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()), std::streamsize(img.pixels.size()));
  if (!in) throw IoError(path + ": truncated PGM raster");
  return img;
}

void write_pgm8(const Gray8& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open file for writing");
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()), std::streamsize(img.pixels.size()));
  if (!out) throw IoError(path + ": write failed");
}

Gray16 read_pgm16(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open file");
  PgmHeader h = read_pgm_header(in, path);
  if (h.maxval != 65535) throw IoError(path + ": expected 16-bit PGM (maxval 65535)");
  Gray16 img{h.width, h.height, {}};
  const size_t n = static_cast<size_t>(h.width) * h.height;
  std::vector<std::uint8_t> raw(n * 2);
  in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size()));
  if (!in) throw IoError(path + ": truncated PGM raster");
  img.pixels.resize(n);
  for (size_t i = 0; i < n; ++i)  // big-endian samples
    img.pixels[i] = static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
  return img;
}

void write_pgm16(const Gray16& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open file for writing");
  out << "P5\n" << img.width << " " << img.height << "\n65535\n";
  std::vector<std::uint8_t> raw(img.pixels.size() * 2);
  for (size_t i = 0; i < img.pixels.size(); ++i) {
    raw[2 * i] = static_cast<std::uint8_t>(img.pixels[i] >> 8);
    raw[2 * i + 1] = static_cast<std::uint8_t>(img.pixels[i] & 0xff);
  }
  out.write(reinterpret_cast<const char*>(raw.data()), std::streamsize(raw.size()));
  if (!out) throw IoError(path + ": write failed");
}

namespace {

struct PngReadCtx {
  std::FILE* fp = nullptr;
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReadCtx() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    if (fp) std::fclose(fp);
  }
};

struct PngWriteCtx {
  std::FILE* fp = nullptr;
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriteCtx() {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    if (fp) std::fclose(fp);
  }
};

}  // namespace

Gray8 read_png_gray8(const std::string& path) {
  PngReadCtx ctx;
  ctx.fp = std::fopen(path.c_str(), "rb");
  if (!ctx.fp) throw IoError(path + ": cannot open file");
  ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!ctx.png) throw IoError(path + ": libpng init failed");
  ctx.info = png_create_info_struct(ctx.png);
  if (!ctx.info) throw IoError(path + ": libpng init failed");
  if (setjmp(png_jmpbuf(ctx.png))) throw IoError(path + ": PNG decode error");

  png_init_io(ctx.png, ctx.fp);
  png_read_info(ctx.png, ctx.info);

  const png_byte color = png_get_color_type(ctx.png, ctx.info);
  const png_byte depth = png_get_bit_depth(ctx.png, ctx.info);
  if (color != PNG_COLOR_TYPE_GRAY)
    throw IoError(path + ": not a grayscale PNG");
  if (depth < 8) png_set_expand_gray_1_2_4_to_8(ctx.png);
  if (depth == 16) png_set_strip_16(ctx.png);
  png_read_update_info(ctx.png, ctx.info);

  Gray8 img;
  img.width = static_cast<int>(png_get_image_width(ctx.png, ctx.info));
  img.height = static_cast<int>(png_get_image_height(ctx.png, ctx.info));
  img.pixels.resize(static_cast<size_t>(img.width) * img.height);
  std::vector<png_bytep> rows(img.height);
  for (int y = 0; y < img.height; ++y)
    rows[y] = img.pixels.data() + static_cast<size_t>(y) * img.width;
  png_read_image(ctx.png, rows.data());
  png_read_end(ctx.png, nullptr);
  return img;
}

namespace {

void write_png_impl(int width, int height, int color_type,
                    const std::uint8_t* pixels, size_t stride,
                    const std::string& path) {
  PngWriteCtx ctx;
  ctx.fp = std::fopen(path.c_str(), "wb");
  if (!ctx.fp) throw IoError(path + ": cannot open file for writing");
  ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!ctx.png) throw IoError(path + ": libpng init failed");
  ctx.info = png_create_info_struct(ctx.png);
  if (!ctx.info) throw IoError(path + ": libpng init failed");
  if (setjmp(png_jmpbuf(ctx.png))) throw IoError(path + ": PNG encode error");

  png_init_io(ctx.png, ctx.fp);
  png_set_IHDR(ctx.png, ctx.info, static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), 8, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(ctx.png, ctx.info);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y)
    rows[y] = const_cast<png_bytep>(pixels + static_cast<size_t>(y) * stride);
  png_write_image(ctx.png, rows.data());
  png_write_end(ctx.png, nullptr);
}

}  // namespace

void write_png_gray8(const Gray8& img, const std::string& path) {
  write_png_impl(img.width, img.height, PNG_COLOR_TYPE_GRAY, img.pixels.data(),
                 static_cast<size_t>(img.width), path);
}

void write_png_rgb8(const Rgb8& img, const std::string& path) {
  write_png_impl(img.width, img.height, PNG_COLOR_TYPE_RGB, img.pixels.data(),
                 static_cast<size_t>(img.width) * 3, path);
}

}  // namespace crowdseg
