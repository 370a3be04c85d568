#include "crowdseg/scalar_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "binary_io.hpp"
#include "crowdseg/errors.hpp"
#include "crowdseg/image_io.hpp"

namespace crowdseg {

ScalarField make_scalar_field(int cols, int rows, double fill) {
  if (cols <= 0 || rows <= 0) throw ValueError("scalar field dimensions must be positive");
  ScalarField f;
  f.cols = cols;
  f.rows = rows;
  f.values.assign(static_cast<size_t>(cols) * rows, fill);
  return f;
}

void validate_scalar_field(const ScalarField& f) {
  for (double v : f.values)
    if (!std::isfinite(v)) throw NumericError("non-finite scalar field");
}

ScalarField read_sfld(const std::string& path) {
  auto in = detail::open_in(path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "SFLD") throw IoError(path + ": not an SFLD file");
  int cols = detail::get_u16le(in, path);
  int rows = detail::get_u16le(in, path);
  for (int i = 0; i < 4; ++i) detail::get_u8(in, path);  // pad
  if (cols <= 0 || rows <= 0) throw IoError(path + ": bad SFLD dimensions");
  ScalarField f = make_scalar_field(cols, rows);
  for (auto& v : f.values) v = detail::get_f32le(in, path);
  return f;
}

void write_sfld(const ScalarField& f, const std::string& path) {
  if (f.cols > 65535 || f.rows > 65535) throw IoError(path + ": field too large for SFLD");
  auto out = detail::open_out(path);
  out.write("SFLD", 4);
  detail::put_u16le(out, static_cast<std::uint16_t>(f.cols));
  detail::put_u16le(out, static_cast<std::uint16_t>(f.rows));
  for (int i = 0; i < 4; ++i) detail::put_u8(out, 0);
  for (double v : f.values) detail::put_f32le(out, static_cast<float>(v));
  if (!out) throw IoError(path + ": write failed");
}

void render_scalar_png(const ScalarField& f, const std::string& path) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : f.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi - lo;
  Gray8 img{f.cols, f.rows, {}};
  img.pixels.resize(f.values.size());
  for (size_t i = 0; i < f.values.size(); ++i) {
    double t = span > 0.0 ? (f.values[i] - lo) / span : 0.0;
    img.pixels[i] = static_cast<std::uint8_t>(std::lround(t * 255.0));
  }
  write_png_gray8(img, path);
}

}  // namespace crowdseg
