#pragma once

#include <string>

#include "crowdseg/advection.hpp"

namespace crowdseg {

enum class CombineMode { max, forward_only, backward_only };

// Every tunable the pipeline exposes, with defaults. File representation is a
// flat `key = value` text file with `#` comments; unknown keys are rejected.
struct PipelineConfig {
  double flow_smoothness = 1.0;   // flow.smoothness
  int flow_iterations = 200;      // flow.iterations
  int flow_window = 0;            // flow.window: 0 = "all", n > 0 = "sliding(n)"
  double advect_T = 30.0;         // advect.T (frames)
  double advect_h = 0.5;          // advect.h (frames)
  double advect_grid_step = 1.0;  // advect.gridStep (px)
  FlowMode advect_mode = FlowMode::steady;  // advect.mode
  double ftle_sigma = 1.5;        // ftle.sigma (px)
  int ftle_margin = 5;            // ftle.margin (px)
  CombineMode ftle_combine = CombineMode::max;  // ftle.combine
  int seg_min_area = 150;         // seg.minArea (px)
  double seg_vacuum_threshold = 0.05;  // seg.vacuumThreshold (px/frame)
  double seg_merge_angle_deg = 30.0;   // seg.mergeAngleDeg
  int seg_merge_band = 5;         // seg.mergeBand (px)

  bool operator==(const PipelineConfig&) const = default;
};

// Throws ValueError naming the offending key when a value is out of range.
void validate_config(const PipelineConfig& cfg);

// Applies one `key = value` entry; throws ValueError naming unknown keys and
// bad values.
void apply_config_entry(PipelineConfig& cfg, const std::string& key,
                        const std::string& value);

PipelineConfig parse_config_text(const std::string& text);
PipelineConfig load_config(const std::string& path);

// Lossless text form: parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const PipelineConfig& cfg);
void save_config(const PipelineConfig& cfg, const std::string& path);

}  // namespace crowdseg
