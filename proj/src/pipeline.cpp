#include "crowdseg/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "crowdseg/errors.hpp"
#include "crowdseg/ftle.hpp"
#include "crowdseg/optical_flow.hpp"
#include "crowdseg/segmentation.hpp"
#include "crowdseg/spectrum.hpp"

namespace fs = std::filesystem;

namespace crowdseg {

namespace {

std::string indexed_name(const char* stem, int i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%04d.%s", stem, i, ext);
  return buf;
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError(dir + ": cannot create output directory");
}

std::vector<std::string> list_by_prefix(const std::string& dir, const std::string& prefix,
                                        const std::string& ext) {
  if (!fs::is_directory(dir)) throw IoError(dir + ": not a directory");
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string name = e.path().filename().string();
    if (name.rfind(prefix, 0) == 0 && name.size() > ext.size() &&
        name.compare(name.size() - ext.size(), ext.size(), ext) == 0)
      out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Reads the per-step fields the unsteady advection consumes: sliding-window
// means when a window is configured, the raw per-pair fields otherwise.
std::vector<FlowField> load_sequence_fields(const std::string& flow_dir,
                                            const PipelineConfig& cfg) {
  const auto paths = cfg.flow_window > 0 ? list_by_prefix(flow_dir, "window_", ".flo")
                                         : list_by_prefix(flow_dir, "flow_", ".flo");
  if (paths.empty()) throw IoError(flow_dir + ": no per-frame flow fields found");
  std::vector<FlowField> fields;
  fields.reserve(paths.size());
  for (const auto& p : paths) fields.push_back(read_flo(p));
  for (const auto& f : fields)
    if (f.width != fields.front().width || f.height != fields.front().height)
      throw ValueError("field size mismatch");
  return fields;
}

// Writes mean.flo (and sliding-window means) from float32-exact fields.
void emit_flow_products(const std::vector<FlowField>& fields, const std::string& out_dir,
                        const PipelineConfig& cfg) {
  write_flo(average_flow(fields), join(out_dir, "mean.flo"));
  if (cfg.flow_window > 0) {
    const int n = cfg.flow_window;
    if (n > static_cast<int>(fields.size()))
      throw ValueError("config key 'flow.window': sliding window larger than the sequence");
    for (int start = 0; start + n <= static_cast<int>(fields.size()); ++start) {
      std::vector<FlowField> window(fields.begin() + start, fields.begin() + start + n);
      write_flo(average_flow(window), join(out_dir, indexed_name("window", start, "flo")));
    }
  }
}

void write_spectrum(const FlowField& mean, const std::string& out_dir) {
  const FlowSpectrum s = flow_spectrum(mean);
  write_sfld(s.log_magnitude, join(out_dir, "spectrum_magnitude.sfld"));
  write_sfld(s.phase, join(out_dir, "spectrum_phase.sfld"));
  render_scalar_png(s.log_magnitude, join(out_dir, "spectrum_magnitude.png"));
  render_scalar_png(s.phase, join(out_dir, "spectrum_phase.png"));
}

}  // namespace

std::vector<std::string> list_frames(const std::string& dir) {
  if (!fs::is_directory(dir)) throw IoError(dir + ": not a directory");
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".pgm" || ext == ".png") out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void flow_stage(const std::vector<std::string>& frame_paths, const std::string& out_dir,
                const PipelineConfig& cfg, bool with_spectrum) {
  if (frame_paths.size() < 2) throw ValueError("need at least 2 frames");
  ensure_out_dir(out_dir);
  std::vector<Frame> frames;
  frames.reserve(frame_paths.size());
  for (const auto& p : frame_paths) frames.push_back(load_frame(p));
  for (const auto& f : frames)
    if (f.width != frames.front().width || f.height != frames.front().height)
      throw ValueError("frame size mismatch");

  std::vector<std::string> written;
  for (size_t i = 0; i + 1 < frames.size(); ++i) {
    const FlowField field = estimate_optical_flow(frames[i], frames[i + 1],
                                                  cfg.flow_smoothness, cfg.flow_iterations);
    const std::string path = join(out_dir, indexed_name("flow", static_cast<int>(i), "flo"));
    write_flo(field, path);
    written.push_back(path);
  }
  // Averaging happens on the float32 values the files carry, so staged and
  // end-to-end runs see identical inputs.
  std::vector<FlowField> fields;
  fields.reserve(written.size());
  for (const auto& p : written) fields.push_back(read_flo(p));
  emit_flow_products(fields, out_dir, cfg);
  if (with_spectrum) write_spectrum(read_flo(join(out_dir, "mean.flo")), out_dir);
}

void flow_stage_from_flo(const std::vector<std::string>& flo_paths,
                         const std::string& out_dir, const PipelineConfig& cfg) {
  if (flo_paths.empty()) throw ValueError("need at least 1 flow file");
  ensure_out_dir(out_dir);
  std::vector<FlowField> fields;
  fields.reserve(flo_paths.size());
  for (size_t i = 0; i < flo_paths.size(); ++i) {
    fields.push_back(read_flo(flo_paths[i]));
    write_flo(fields.back(), join(out_dir, indexed_name("flow", static_cast<int>(i), "flo")));
  }
  for (const auto& f : fields)
    if (f.width != fields.front().width || f.height != fields.front().height)
      throw ValueError("field size mismatch");
  emit_flow_products(fields, out_dir, cfg);
}

void advect_stage(const std::string& flow_dir, const std::string& out_dir,
                  const PipelineConfig& cfg) {
  validate_config(cfg);
  ensure_out_dir(out_dir);
  const std::string fwd_path = join(out_dir, "forward.fmap");
  const std::string bwd_path = join(out_dir, "backward.fmap");

  if (cfg.advect_mode == FlowMode::steady) {
    const FlowField mean = read_flo(join(flow_dir, "mean.flo"));
    validate_flow_field(mean);
    const ParticleGrid grid = make_pixel_grid(mean.width, mean.height, cfg.advect_grid_step);
    const auto [fwd, bwd] = advect_both(SteadySampler{&mean}, extent_of(mean), grid,
                                        cfg.advect_T, cfg.advect_h);
    write_fmap(fwd, fwd_path);
    write_fmap(bwd, bwd_path);
  } else {
    const std::vector<FlowField> fields = load_sequence_fields(flow_dir, cfg);
    for (const auto& f : fields) validate_flow_field(f);
    const ParticleGrid grid =
        make_pixel_grid(fields.front().width, fields.front().height, cfg.advect_grid_step);
    const Extent dom = extent_of(fields.front());
    const FlowMap fwd =
        advect_grid(SequenceSampler{&fields, false}, dom, grid,
                    make_integration_spec(cfg.advect_T, cfg.advect_h, Direction::forward,
                                          FlowMode::unsteady));
    const FlowMap bwd =
        advect_grid(SequenceSampler{&fields, true}, dom, grid,
                    make_integration_spec(cfg.advect_T, cfg.advect_h, Direction::backward,
                                          FlowMode::unsteady));
    write_fmap(fwd, fwd_path);
    write_fmap(bwd, bwd_path);
  }
}

namespace {

// FMAP files carry no grid geometry; reconstruct it from the config.
FlowMap load_fmap_with_geometry(const std::string& path, const PipelineConfig& cfg) {
  FlowMap m = read_fmap(path);
  m.step_x = m.step_y = cfg.advect_grid_step;
  return m;
}

ScalarField processed_ftle(const FlowMap& map, const PipelineConfig& cfg) {
  ScalarField f = compute_ftle_field(map);
  f = strip_boundary(f, cfg.ftle_margin);
  return gaussian_smooth(f, cfg.ftle_sigma);
}

}  // namespace

void ftle_stage(const std::string& fmap_dir, const std::string& out_dir,
                const PipelineConfig& cfg) {
  validate_config(cfg);
  ensure_out_dir(out_dir);
  ScalarField combined;
  const bool need_fwd = cfg.ftle_combine != CombineMode::backward_only;
  const bool need_bwd = cfg.ftle_combine != CombineMode::forward_only;
  ScalarField fwd, bwd;
  if (need_fwd) {
    fwd = processed_ftle(load_fmap_with_geometry(join(fmap_dir, "forward.fmap"), cfg), cfg);
    write_sfld(fwd, join(out_dir, "ftle_forward.sfld"));
    render_scalar_png(fwd, join(out_dir, "ftle_forward.png"));
  }
  if (need_bwd) {
    bwd = processed_ftle(load_fmap_with_geometry(join(fmap_dir, "backward.fmap"), cfg), cfg);
    write_sfld(bwd, join(out_dir, "ftle_backward.sfld"));
    render_scalar_png(bwd, join(out_dir, "ftle_backward.png"));
  }
  switch (cfg.ftle_combine) {
    case CombineMode::max:
      combined = combine_ftle(fwd, bwd);
      break;
    case CombineMode::forward_only:
      combined = fwd;
      break;
    case CombineMode::backward_only:
      combined = bwd;
      break;
  }
  write_sfld(combined, join(out_dir, "ftle_combined.sfld"));
  render_scalar_png(combined, join(out_dir, "ftle_combined.png"));
}

void segment_stage(const std::string& field_path, const std::string& flow_path,
                   const std::string& frame_path, const std::string& out_dir,
                   const PipelineConfig& cfg) {
  validate_config(cfg);
  ensure_out_dir(out_dir);
  ScalarField field = read_sfld(field_path);
  // The SFLD format stores no offset; it is implied by the pipeline geometry
  // (one ring of gradient stencil plus the stripped margin).
  field.offset_x = field.offset_y = 1 + cfg.ftle_margin;

  const FlowField image_flow = read_flo(flow_path);
  const ParticleGrid grid =
      make_pixel_grid(image_flow.width, image_flow.height, cfg.advect_grid_step);
  // Flow resampled at the particle-grid nodes, so label-map offsets index it
  // directly in grid units (exact copy at the default unit step).
  FlowField grid_flow = make_flow_field(grid.cols, grid.rows);
  for (int row = 0; row < grid.rows; ++row)
    for (int col = 0; col < grid.cols; ++col) {
      const Vec2 p = grid.initial(col, row);
      const Vec2 w = sample_bilinear(image_flow, p.x, p.y);
      grid_flow.u_at(col, row) = w.x;
      grid_flow.v_at(col, row) = w.y;
    }

  LabelMap labels = watershed(field);
  labels = remove_small_segments(labels, cfg.seg_min_area);
  labels = remove_vacuum_segments(labels, grid_flow, cfg.seg_vacuum_threshold);
  labels = merge_similar_segments(labels, grid_flow,
                                  cfg.seg_merge_angle_deg * M_PI / 180.0, cfg.seg_merge_band);

  write_label_pgm(labels, join(out_dir, "labels.pgm"));
  write_label_png(labels, join(out_dir, "labels.png"));
  write_stats_jsonl(segment_stats(labels, grid_flow), join(out_dir, "stats.jsonl"));
  if (!frame_path.empty())
    render_overlay_png(labels, grid, load_frame(frame_path), join(out_dir, "overlay.png"));
}

void run_pipeline(const std::vector<std::string>& frame_paths, const std::string& out_dir,
                  const PipelineConfig& cfg) {
  validate_config(cfg);
  flow_stage(frame_paths, out_dir, cfg);
  advect_stage(out_dir, out_dir, cfg);
  ftle_stage(out_dir, out_dir, cfg);
  segment_stage(join(out_dir, "ftle_combined.sfld"), join(out_dir, "mean.flo"),
                frame_paths.front(), out_dir, cfg);
}

void run_pipeline_flo(const std::vector<std::string>& flo_paths, const std::string& out_dir,
                      const PipelineConfig& cfg) {
  validate_config(cfg);
  flow_stage_from_flo(flo_paths, out_dir, cfg);
  advect_stage(out_dir, out_dir, cfg);
  ftle_stage(out_dir, out_dir, cfg);
  segment_stage(join(out_dir, "ftle_combined.sfld"), join(out_dir, "mean.flo"),
                "", out_dir, cfg);
}

}  // namespace crowdseg
