#include "crowdseg/flow_field.hpp"

#include <algorithm>
#include <cmath>

#include "binary_io.hpp"
#include "crowdseg/errors.hpp"

namespace crowdseg {

FlowField make_flow_field(int width, int height) {
  if (width <= 0 || height <= 0) throw ValueError("flow field dimensions must be positive");
  FlowField f;
  f.width = width;
  f.height = height;
  f.u.assign(static_cast<size_t>(width) * height, 0.0);
  f.v.assign(static_cast<size_t>(width) * height, 0.0);
  return f;
}

void validate_flow_field(const FlowField& f) {
  for (double x : f.u)
    if (!std::isfinite(x)) throw NumericError("non-finite flow field");
  for (double x : f.v)
    if (!std::isfinite(x)) throw NumericError("non-finite flow field");
}

FlowField average_flow(const std::vector<FlowField>& fields) {
  if (fields.empty()) throw ValueError("nothing to average");
  const int w = fields.front().width, h = fields.front().height;
  for (const auto& f : fields)
    if (f.width != w || f.height != h) throw ValueError("field size mismatch");
  FlowField mean = make_flow_field(w, h);
  for (const auto& f : fields) {
    for (size_t i = 0; i < mean.u.size(); ++i) {
      mean.u[i] += f.u[i];
      mean.v[i] += f.v[i];
    }
  }
  const double inv = 1.0 / static_cast<double>(fields.size());
  for (size_t i = 0; i < mean.u.size(); ++i) {
    mean.u[i] *= inv;
    mean.v[i] *= inv;
  }
  return mean;
}

Vec2 sample_bilinear(const FlowField& field, double x, double y) {
  const int w = field.width, h = field.height;
  double cx = std::clamp(x, 0.0, static_cast<double>(w - 1));
  double cy = std::clamp(y, 0.0, static_cast<double>(h - 1));
  int x0 = w > 1 ? std::min(static_cast<int>(std::floor(cx)), w - 2) : 0;
  int y0 = h > 1 ? std::min(static_cast<int>(std::floor(cy)), h - 2) : 0;
  int x1 = w > 1 ? x0 + 1 : 0;
  int y1 = h > 1 ? y0 + 1 : 0;
  double fx = cx - x0, fy = cy - y0;
  double w00 = (1.0 - fx) * (1.0 - fy);
  double w10 = fx * (1.0 - fy);
  double w01 = (1.0 - fx) * fy;
  double w11 = fx * fy;
  Vec2 r;
  r.x = w00 * field.u_at(x0, y0) + w10 * field.u_at(x1, y0) +
        w01 * field.u_at(x0, y1) + w11 * field.u_at(x1, y1);
  r.y = w00 * field.v_at(x0, y0) + w10 * field.v_at(x1, y0) +
        w01 * field.v_at(x0, y1) + w11 * field.v_at(x1, y1);
  return r;
}

ScalarField flow_magnitude(const FlowField& field) {
  ScalarField m = make_scalar_field(field.width, field.height);
  m.units = "px/frame";
  for (size_t i = 0; i < field.u.size(); ++i)
    m.values[i] = std::hypot(field.u[i], field.v[i]);
  return m;
}

namespace {
constexpr float kFloMagic = 202021.25f;
}

FlowField read_flo(const std::string& path) {
  auto in = detail::open_in(path);
  float magic = detail::get_f32le(in, path);
  if (magic != kFloMagic) throw IoError(path + ": not a .flo file (bad magic)");
  std::int32_t w = detail::get_i32le(in, path);
  std::int32_t h = detail::get_i32le(in, path);
  if (w <= 0 || h <= 0 || w > 100000 || h > 100000)
    throw IoError(path + ": bad .flo dimensions");
  FlowField f = make_flow_field(w, h);
  for (size_t i = 0; i < f.u.size(); ++i) {
    f.u[i] = detail::get_f32le(in, path);
    f.v[i] = detail::get_f32le(in, path);
  }
  return f;
}

void write_flo(const FlowField& field, const std::string& path) {
  auto out = detail::open_out(path);
  detail::put_f32le(out, kFloMagic);
  detail::put_i32le(out, field.width);
  detail::put_i32le(out, field.height);
  for (size_t i = 0; i < field.u.size(); ++i) {
    detail::put_f32le(out, static_cast<float>(field.u[i]));
    detail::put_f32le(out, static_cast<float>(field.v[i]));
  }
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace crowdseg
