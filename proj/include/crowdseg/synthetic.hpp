#pragma once

#include <cstdint>
#include <vector>

#include "crowdseg/flow_field.hpp"
#include "crowdseg/frame.hpp"
#include "crowdseg/segmentation.hpp"

namespace crowdseg {

enum class ScenarioKind { uniform, rotation, saddle, double_gyre, counter_flow, annulus };

// Analytic velocity scenarios with known ground truth. Unused parameters are
// ignored per kind; center_x/center_y default to the image center when
// negative.
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::uniform;
  int width = 128;
  int height = 128;
  int frames = 2;

  double ux = 1.0, uy = 0.0;       // uniform components (px/frame)
  double omega = 0.05;             // rotation rate (rad/frame)
  double rate = 0.05;              // saddle strength (1/frame)
  double center_x = -1.0, center_y = -1.0;
  double gyre_a = 0.1;             // double-gyre amplitude
  double gyre_eps = 0.25;          // double-gyre perturbation
  double gyre_omega = 0.6283185307179586;  // 2*pi/10
  double speed = 1.0;              // counter_flow / annulus speed (px/frame)
  double inner_radius = 25.0;
  double outer_radius = 55.0;
};

void validate_scenario(const ScenarioSpec& spec);

Vec2 scenario_center(const ScenarioSpec& spec);

// Analytic velocity at an arbitrary point; gen_field evaluates this at pixel
// centers. Usable directly as an advection velocity source via
// ScenarioSampler.
Vec2 scenario_velocity(const ScenarioSpec& spec, double x, double y, double t);

struct ScenarioSampler {
  ScenarioSpec spec;
  Vec2 operator()(double x, double y, double t) const {
    return scenario_velocity(spec, x, y, t);
  }
};

// Field sampled at pixel centers at time t.
FlowField gen_field(const ScenarioSpec& spec, double t);

// Seeded band-limited noise texture warped backward through the analytic
// field, frame by frame. Deterministic for a fixed seed.
std::vector<Frame> gen_frames(const ScenarioSpec& spec, std::uint64_t texture_seed);

// Expected segment labels for acceptance scoring: 0 = don't care. counter_flow
// yields {1 top, 2 bottom} outside the blend band; annulus yields {1} on the
// moving ring. Other kinds have no ground truth (all zero).
LabelMap ground_truth_masks(const ScenarioSpec& spec);

}  // namespace crowdseg
