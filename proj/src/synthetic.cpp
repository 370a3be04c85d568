#include "crowdseg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "crowdseg/errors.hpp"
#include "crowdseg/ftle.hpp"

namespace crowdseg {

namespace {

double smoothstep(double e0, double e1, double x) {
  double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

}  // namespace

void validate_scenario(const ScenarioSpec& spec) {
  if (spec.width < 8 || spec.height < 8) throw ValueError("scenario too small (min 8x8)");
  if (spec.frames < 1) throw ValueError("scenario frame count must be positive");
  switch (spec.kind) {
    case ScenarioKind::annulus: {
      const double rmax = std::min(spec.width, spec.height) / 2.0;
      if (!(spec.inner_radius > 0.0) || !(spec.inner_radius < spec.outer_radius) ||
          !(spec.outer_radius < rmax))
        throw ValueError("annulus radii must satisfy 0 < inner < outer < min(w,h)/2");
      if (!(spec.speed > 0.0)) throw ValueError("annulus speed must be positive");
      break;
    }
    case ScenarioKind::counter_flow:
      if (!(spec.speed > 0.0)) throw ValueError("counter_flow speed must be positive");
      break;
    case ScenarioKind::double_gyre:
      if (!(spec.gyre_a > 0.0)) throw ValueError("double_gyre amplitude must be positive");
      if (spec.gyre_eps < 0.0 || spec.gyre_eps > 0.5)
        throw ValueError("double_gyre eps must be in [0, 0.5]");
      break;
    case ScenarioKind::rotation:
    case ScenarioKind::saddle:
    case ScenarioKind::uniform:
      break;
  }
}

Vec2 scenario_center(const ScenarioSpec& spec) {
  return {spec.center_x >= 0.0 ? spec.center_x : (spec.width - 1) / 2.0,
          spec.center_y >= 0.0 ? spec.center_y : (spec.height - 1) / 2.0};
}

Vec2 scenario_velocity(const ScenarioSpec& spec, double x, double y, double t) {
  const Vec2 c = scenario_center(spec);
  switch (spec.kind) {
    case ScenarioKind::uniform:
      return {spec.ux, spec.uy};
    case ScenarioKind::rotation:
      return {-spec.omega * (y - c.y), spec.omega * (x - c.x)};
    case ScenarioKind::saddle:
      return {spec.rate * (x - c.x), -spec.rate * (y - c.y)};
    case ScenarioKind::double_gyre: {
      // Stream function psi = A sin(pi f(x,t)) sin(pi y) on [0,2]x[0,1],
      // rescaled so pixel trajectories are the image of box trajectories.
      const double sx = (spec.width - 1) / 2.0;
      const double sy = static_cast<double>(spec.height - 1);
      const double xt = x / sx, yt = y / sy;
      const double a = spec.gyre_eps * std::sin(spec.gyre_omega * t);
      const double b = 1.0 - 2.0 * a;
      const double f = a * xt * xt + b * xt;
      const double dfdx = 2.0 * a * xt + b;
      const double ub = -M_PI * spec.gyre_a * std::sin(M_PI * f) * std::cos(M_PI * yt);
      const double vb = M_PI * spec.gyre_a * std::cos(M_PI * f) * std::sin(M_PI * yt) * dfdx;
      return {ub * sx, vb * sy};
    }
    case ScenarioKind::counter_flow: {
      // +speed on the top half, -speed on the bottom, 3-px blend at the midline.
      const double mid = (spec.height - 1) / 2.0;
      const double s = smoothstep(mid - 1.5, mid + 1.5, y);
      return {spec.speed * (1.0 - 2.0 * s), 0.0};
    }
    case ScenarioKind::annulus: {
      const double dx = x - c.x, dy = y - c.y;
      const double r = std::hypot(dx, dy);
      if (r < 1e-9) return {0.0, 0.0};
      // full speed on [inner, outer], 2-px taper just outside either rim
      const double wgt = smoothstep(spec.inner_radius - 2.0, spec.inner_radius, r) *
                         (1.0 - smoothstep(spec.outer_radius, spec.outer_radius + 2.0, r));
      return {spec.speed * wgt * dy / r, -spec.speed * wgt * dx / r};
    }
  }
  return {0.0, 0.0};
}

FlowField gen_field(const ScenarioSpec& spec, double t) {
  validate_scenario(spec);
  FlowField f = make_flow_field(spec.width, spec.height);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const Vec2 v = scenario_velocity(spec, x, y, t);
      f.u_at(x, y) = v.x;
      f.v_at(x, y) = v.y;
    }
  }
  return f;
}

namespace {

// Band-limited noise: random-phase plane waves with wavelengths in [8,13] px,
// contrast-normalized. Wavelengths sit where the flow solver tracks 1-2 px
// motion well; pure low-pass noise leaves large weak-gradient pockets.
Frame noise_texture(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  constexpr int kWaves = 24;
  double kx[kWaves], ky[kWaves], phase[kWaves];
  for (int i = 0; i < kWaves; ++i) {
    const double lambda = uniform(8.0, 13.0);
    const double theta = uniform(0.0, 2.0 * M_PI);
    kx[i] = 2.0 * M_PI / lambda * std::cos(theta);
    ky[i] = 2.0 * M_PI / lambda * std::sin(theta);
    phase[i] = uniform(0.0, 2.0 * M_PI);
  }
  Frame f = make_frame(width, height);
  double sum = 0.0, sum2 = 0.0;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      double v = 0.0;
      for (int i = 0; i < kWaves; ++i) v += std::sin(kx[i] * x + ky[i] * y + phase[i]);
      f.at(x, y) = v;
      sum += v;
      sum2 += v * v;
    }
  const double n = static_cast<double>(f.intensity.size());
  const double mean = sum / n;
  const double sd = std::sqrt(std::max(sum2 / n - mean * mean, 1e-12));
  for (double& v : f.intensity)
    v = std::clamp(0.5 + 0.25 * (v - mean) / sd, 0.0, 1.0);
  return f;
}

}  // namespace

std::vector<Frame> gen_frames(const ScenarioSpec& spec, std::uint64_t texture_seed) {
  validate_scenario(spec);
  if (spec.frames < 2) throw ValueError("frame synthesis needs at least 2 frames");
  std::vector<Frame> frames;
  frames.reserve(spec.frames);
  frames.push_back(noise_texture(spec.width, spec.height, texture_seed));
  for (int k = 1; k < spec.frames; ++k) {
    const Frame& prev = frames.back();
    Frame next = make_frame(spec.width, spec.height);
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        const Vec2 v = scenario_velocity(spec, x, y, k - 1.0);
        next.at(x, y) = std::clamp(
            sample_frame_bilinear(prev, x - v.x, y - v.y), 0.0, 1.0);
      }
    }
    frames.push_back(std::move(next));
  }
  return frames;
}

LabelMap ground_truth_masks(const ScenarioSpec& spec) {
  validate_scenario(spec);
  LabelMap m;
  m.cols = spec.width;
  m.rows = spec.height;
  m.labels.assign(static_cast<size_t>(spec.width) * spec.height, 0);
  switch (spec.kind) {
    case ScenarioKind::counter_flow: {
      const double mid = (spec.height - 1) / 2.0;
      for (int y = 0; y < spec.height; ++y) {
        int l = 0;  // the blend band stays don't-care
        if (y < mid - 1.5) l = 1;
        if (y > mid + 1.5) l = 2;
        if (l > 0)
          for (int x = 0; x < spec.width; ++x) m.at(x, y) = l;
      }
      m.count = 2;
      break;
    }
    case ScenarioKind::annulus: {
      const Vec2 c = scenario_center(spec);
      for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x) {
          const double r = std::hypot(x - c.x, y - c.y);
          if (r >= spec.inner_radius && r <= spec.outer_radius) m.at(x, y) = 1;
        }
      m.count = 1;
      break;
    }
    default:
      break;  // no ground truth for the other kinds
  }
  return m;
}

}  // namespace crowdseg
