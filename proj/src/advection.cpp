#include "crowdseg/advection.hpp"

#include <cmath>

#include "binary_io.hpp"

namespace crowdseg {

ParticleGrid make_pixel_grid(int width, int height, double step) {
  if (width < 2 || height < 2) throw ValueError("domain too small for a particle grid");
  if (!(step > 0.0)) throw ValueError("grid step must be positive");
  ParticleGrid g;
  g.step_x = g.step_y = step;
  g.cols = static_cast<int>(std::floor((width - 1) / step)) + 1;
  g.rows = static_cast<int>(std::floor((height - 1) / step)) + 1;
  if (g.cols < 3 || g.rows < 3) throw ValueError("particle grid must be at least 3x3");
  return g;
}

IntegrationSpec make_integration_spec(double T, double h, Direction direction, FlowMode mode) {
  if (!(T > 0.0)) throw ValueError("integration length T must be positive");
  if (!(h > 0.0)) throw ValueError("step size h must be positive");
  if (h > T + 1e-12) throw ValueError("step size h must not exceed T");
  IntegrationSpec spec;
  spec.steps = std::max(1, static_cast<int>(std::lround(T / h)));
  spec.h = h;
  spec.T = spec.steps * h;
  spec.direction = direction;
  spec.mode = mode;
  return spec;
}

FlowMap read_fmap(const std::string& path) {
  auto in = detail::open_in(path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "FMAP") throw IoError(path + ": not an FMAP file");
  FlowMap m;
  m.cols = detail::get_u16le(in, path);
  m.rows = detail::get_u16le(in, path);
  m.T = detail::get_f32le(in, path);
  const std::uint8_t dir = detail::get_u8(in, path);
  if (dir > 1) throw IoError(path + ": bad FMAP direction byte");
  m.direction = static_cast<Direction>(dir);
  for (int i = 0; i < 3; ++i) detail::get_u8(in, path);  // pad
  if (m.cols <= 0 || m.rows <= 0) throw IoError(path + ": bad FMAP dimensions");
  const size_t n = static_cast<size_t>(m.cols) * m.rows;
  m.final_x.resize(n);
  m.final_y.resize(n);
  for (auto& v : m.final_x) v = detail::get_f32le(in, path);
  for (auto& v : m.final_y) v = detail::get_f32le(in, path);
  return m;
}

void write_fmap(const FlowMap& map, const std::string& path) {
  if (map.cols > 65535 || map.rows > 65535) throw IoError(path + ": map too large for FMAP");
  auto out = detail::open_out(path);
  out.write("FMAP", 4);
  detail::put_u16le(out, static_cast<std::uint16_t>(map.cols));
  detail::put_u16le(out, static_cast<std::uint16_t>(map.rows));
  detail::put_f32le(out, static_cast<float>(map.T));
  detail::put_u8(out, static_cast<std::uint8_t>(map.direction));
  for (int i = 0; i < 3; ++i) detail::put_u8(out, 0);
  for (double v : map.final_x) detail::put_f32le(out, static_cast<float>(v));
  for (double v : map.final_y) detail::put_f32le(out, static_cast<float>(v));
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace crowdseg
