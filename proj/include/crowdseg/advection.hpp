#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "crowdseg/errors.hpp"
#include "crowdseg/flow_field.hpp"

namespace crowdseg {

enum class Direction : std::uint8_t { forward = 0, backward = 1 };

// steady: one time-averaged field; unsteady: per-frame field sequence.
enum class FlowMode { steady, unsteady };

// Regular grid of particle seed positions over the flow domain.
struct ParticleGrid {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double step_x = 1.0;
  double step_y = 1.0;
  int cols = 0;
  int rows = 0;

  Vec2 initial(int col, int row) const {
    return {origin_x + col * step_x, origin_y + row * step_y};
  }
};

// One particle per `step` pixels covering [0,width-1]x[0,height-1].
ParticleGrid make_pixel_grid(int width, int height, double step = 1.0);

// Integration length T is rounded to the nearest positive multiple of h at
// construction, so steps = T/h is always a positive integer.
struct IntegrationSpec {
  double T = 0.0;
  double h = 0.0;
  Direction direction = Direction::forward;
  FlowMode mode = FlowMode::steady;
  int steps = 0;
};

IntegrationSpec make_integration_spec(double T, double h,
                                      Direction direction = Direction::forward,
                                      FlowMode mode = FlowMode::steady);

// Final particle positions after integrating for time T: finalX is the x-flow
// map, finalY the y-flow map. Values stay inside the clamped domain.
struct FlowMap {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double step_x = 1.0;
  double step_y = 1.0;
  int cols = 0;
  int rows = 0;
  std::vector<double> final_x;  // row-major
  std::vector<double> final_y;
  Direction direction = Direction::forward;
  double T = 0.0;

  double fx(int col, int row) const { return final_x[static_cast<size_t>(row) * cols + col]; }
  double fy(int col, int row) const { return final_y[static_cast<size_t>(row) * cols + col]; }
};

// Coordinate domain [0,width-1]x[0,height-1] that advected particles are
// clamped to.
struct Extent {
  double width = 0.0;
  double height = 0.0;
};

inline Extent extent_of(const FlowField& f) {
  return {static_cast<double>(f.width), static_cast<double>(f.height)};
}

// Velocity source over a single time-averaged field.
struct SteadySampler {
  const FlowField* field = nullptr;
  Vec2 operator()(double x, double y, double /*t*/) const {
    return sample_bilinear(*field, x, y);
  }
};

// Velocity source over a per-frame field sequence: the field at time t is the
// one indexed by floor(t), clamped to the sequence; with `reverse` set the
// sequence is indexed from the end (backward integration).
struct SequenceSampler {
  const std::vector<FlowField>* fields = nullptr;
  bool reverse = false;
  Vec2 operator()(double x, double y, double t) const {
    const int n = static_cast<int>(fields->size());
    int k = static_cast<int>(std::floor(t));
    k = std::clamp(k, 0, n - 1);
    const FlowField& f = (*fields)[reverse ? n - 1 - k : k];
    return sample_bilinear(f, x, y);
  }
};

// One classical RK4 step of dx/dt = sign * V(x, t); the result is clamped to
// the domain. `vel` is any callable (x, y, t) -> Vec2.
template <typename VelFn>
Vec2 rk4_step(const VelFn& vel, Vec2 pos, double t, double h, double sign,
              const Extent& dom) {
  const Vec2 k1 = vel(pos.x, pos.y, t);
  const Vec2 k2 = vel(pos.x + 0.5 * h * sign * k1.x, pos.y + 0.5 * h * sign * k1.y, t + 0.5 * h);
  const Vec2 k3 = vel(pos.x + 0.5 * h * sign * k2.x, pos.y + 0.5 * h * sign * k2.y, t + 0.5 * h);
  const Vec2 k4 = vel(pos.x + h * sign * k3.x, pos.y + h * sign * k3.y, t + h);
  Vec2 r{pos.x + sign * h / 6.0 * (k1.x + 2.0 * (k2.x + k3.x) + k4.x),
         pos.y + sign * h / 6.0 * (k1.y + 2.0 * (k2.y + k3.y) + k4.y)};
  r.x = std::clamp(r.x, 0.0, dom.width - 1.0);
  r.y = std::clamp(r.y, 0.0, dom.height - 1.0);
  return r;
}

// Advects every grid particle for spec.steps RK4 steps. Backward direction
// integrates the time-reversed flow (sign = -1). Particles are independent and
// the result is deterministic.
template <typename VelFn>
FlowMap advect_grid(const VelFn& vel, const Extent& dom, const ParticleGrid& grid,
                    const IntegrationSpec& spec) {
  if (grid.cols < 3 || grid.rows < 3) throw ValueError("particle grid must be at least 3x3");
  const double last_x = grid.origin_x + (grid.cols - 1) * grid.step_x;
  const double last_y = grid.origin_y + (grid.rows - 1) * grid.step_y;
  const double tol = 1e-9;
  if (grid.origin_x < -tol || grid.origin_y < -tol ||
      last_x > dom.width - 1.0 + tol || last_y > dom.height - 1.0 + tol)
    throw ValueError("grid exceeds field");

  const double sign = spec.direction == Direction::forward ? 1.0 : -1.0;
  FlowMap m;
  m.origin_x = grid.origin_x;
  m.origin_y = grid.origin_y;
  m.step_x = grid.step_x;
  m.step_y = grid.step_y;
  m.cols = grid.cols;
  m.rows = grid.rows;
  m.direction = spec.direction;
  m.T = spec.steps * spec.h;
  m.final_x.resize(static_cast<size_t>(grid.cols) * grid.rows);
  m.final_y.resize(m.final_x.size());

  for (int row = 0; row < grid.rows; ++row) {
    for (int col = 0; col < grid.cols; ++col) {
      Vec2 p = grid.initial(col, row);
      p.x = std::clamp(p.x, 0.0, dom.width - 1.0);
      p.y = std::clamp(p.y, 0.0, dom.height - 1.0);
      for (int s = 0; s < spec.steps; ++s)
        p = rk4_step(vel, p, s * spec.h, spec.h, sign, dom);
      const size_t i = static_cast<size_t>(row) * grid.cols + col;
      m.final_x[i] = p.x;
      m.final_y[i] = p.y;
    }
  }
  return m;
}

// Forward and backward maps from the same (steady) velocity source.
template <typename VelFn>
std::pair<FlowMap, FlowMap> advect_both(const VelFn& vel, const Extent& dom,
                                        const ParticleGrid& grid, double T, double h) {
  FlowMap fwd = advect_grid(vel, dom, grid, make_integration_spec(T, h, Direction::forward));
  FlowMap bwd = advect_grid(vel, dom, grid, make_integration_spec(T, h, Direction::backward));
  return {std::move(fwd), std::move(bwd)};
}

// FMAP: 16-byte header ("FMAP", uint16 cols, uint16 rows, float32 T, uint8
// direction, 3 pad bytes), then finalX and finalY planes as row-major
// little-endian float32. Grid geometry is not stored; readers get the default
// origin (0,0) and unit step (staged runs take geometry from the config).
FlowMap read_fmap(const std::string& path);
void write_fmap(const FlowMap& map, const std::string& path);

}  // namespace crowdseg
