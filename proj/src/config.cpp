#include "crowdseg/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "crowdseg/errors.hpp"

namespace crowdseg {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || !std::isfinite(out))
    throw ValueError("config key '" + key + "': not a number: '" + value + "'");
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  int out = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last)
    throw ValueError("config key '" + key + "': not an integer: '" + value + "'");
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

void validate_config(const PipelineConfig& c) {
  auto fail = [](const std::string& key, const std::string& why) {
    throw ValueError("config key '" + key + "': " + why);
  };
  if (!(c.flow_smoothness > 0.0)) fail("flow.smoothness", "must be positive");
  if (c.flow_iterations < 1) fail("flow.iterations", "must be at least 1");
  if (c.flow_window < 0) fail("flow.window", "sliding window size must be positive");
  if (!(c.advect_T > 0.0)) fail("advect.T", "must be positive");
  if (!(c.advect_h > 0.0)) fail("advect.h", "must be positive");
  if (c.advect_h > c.advect_T) fail("advect.h", "must not exceed advect.T");
  if (!(c.advect_grid_step > 0.0)) fail("advect.gridStep", "must be positive");
  if (!(c.ftle_sigma > 0.0)) fail("ftle.sigma", "must be positive");
  if (c.ftle_margin < 0) fail("ftle.margin", "must be non-negative");
  if (c.seg_min_area < 1) fail("seg.minArea", "must be at least 1");
  if (c.seg_vacuum_threshold < 0.0) fail("seg.vacuumThreshold", "must be non-negative");
  if (c.seg_merge_angle_deg < 0.0 || c.seg_merge_angle_deg > 180.0)
    fail("seg.mergeAngleDeg", "must be in [0, 180]");
  if (c.seg_merge_band < 1) fail("seg.mergeBand", "must be at least 1");
}

void apply_config_entry(PipelineConfig& cfg, const std::string& key,
                        const std::string& value) {
  if (key == "flow.smoothness") {
    cfg.flow_smoothness = parse_double(key, value);
  } else if (key == "flow.iterations") {
    cfg.flow_iterations = parse_int(key, value);
  } else if (key == "flow.window") {
    if (value == "all") {
      cfg.flow_window = 0;
    } else if (value.rfind("sliding(", 0) == 0 && value.back() == ')') {
      cfg.flow_window = parse_int(key, value.substr(8, value.size() - 9));
      if (cfg.flow_window < 1)
        throw ValueError("config key 'flow.window': sliding window size must be positive");
    } else {
      throw ValueError("config key 'flow.window': expected 'all' or 'sliding(n)'");
    }
  } else if (key == "advect.T") {
    cfg.advect_T = parse_double(key, value);
  } else if (key == "advect.h") {
    cfg.advect_h = parse_double(key, value);
  } else if (key == "advect.gridStep") {
    cfg.advect_grid_step = parse_double(key, value);
  } else if (key == "advect.mode") {
    if (value == "steady")
      cfg.advect_mode = FlowMode::steady;
    else if (value == "unsteady")
      cfg.advect_mode = FlowMode::unsteady;
    else
      throw ValueError("config key 'advect.mode': expected 'steady' or 'unsteady'");
  } else if (key == "ftle.sigma") {
    cfg.ftle_sigma = parse_double(key, value);
  } else if (key == "ftle.margin") {
    cfg.ftle_margin = parse_int(key, value);
  } else if (key == "ftle.combine") {
    if (value == "max")
      cfg.ftle_combine = CombineMode::max;
    else if (value == "forward_only")
      cfg.ftle_combine = CombineMode::forward_only;
    else if (value == "backward_only")
      cfg.ftle_combine = CombineMode::backward_only;
    else
      throw ValueError(
          "config key 'ftle.combine': expected 'max', 'forward_only' or 'backward_only'");
  } else if (key == "seg.minArea") {
    cfg.seg_min_area = parse_int(key, value);
  } else if (key == "seg.vacuumThreshold") {
    cfg.seg_vacuum_threshold = parse_double(key, value);
  } else if (key == "seg.mergeAngleDeg") {
    cfg.seg_merge_angle_deg = parse_double(key, value);
  } else if (key == "seg.mergeBand") {
    cfg.seg_merge_band = parse_int(key, value);
  } else {
    throw ValueError("unknown config key '" + key + "'");
  }
}

PipelineConfig parse_config_text(const std::string& text) {
  PipelineConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ValueError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  validate_config(cfg);
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize_config(const PipelineConfig& c) {
  std::ostringstream out;
  out << "flow.smoothness = " << format_double(c.flow_smoothness) << "\n";
  out << "flow.iterations = " << c.flow_iterations << "\n";
  out << "flow.window = "
      << (c.flow_window == 0 ? std::string("all")
                             : "sliding(" + std::to_string(c.flow_window) + ")")
      << "\n";
  out << "advect.T = " << format_double(c.advect_T) << "\n";
  out << "advect.h = " << format_double(c.advect_h) << "\n";
  out << "advect.gridStep = " << format_double(c.advect_grid_step) << "\n";
  out << "advect.mode = " << (c.advect_mode == FlowMode::steady ? "steady" : "unsteady")
      << "\n";
  out << "ftle.sigma = " << format_double(c.ftle_sigma) << "\n";
  out << "ftle.margin = " << c.ftle_margin << "\n";
  out << "ftle.combine = "
      << (c.ftle_combine == CombineMode::max
              ? "max"
              : (c.ftle_combine == CombineMode::forward_only ? "forward_only"
                                                             : "backward_only"))
      << "\n";
  out << "seg.minArea = " << c.seg_min_area << "\n";
  out << "seg.vacuumThreshold = " << format_double(c.seg_vacuum_threshold) << "\n";
  out << "seg.mergeAngleDeg = " << format_double(c.seg_merge_angle_deg) << "\n";
  out << "seg.mergeBand = " << c.seg_merge_band << "\n";
  return out.str();
}

void save_config(const PipelineConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open file for writing");
  out << serialize_config(cfg);
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace crowdseg
