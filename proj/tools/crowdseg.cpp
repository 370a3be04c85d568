// crowdseg: segment dominant motion flows in dense-crowd image sequences.
//
// pipeline: frames -> optical flow -> mean field -> particle advection ->
// forward/backward FTLE -> watershed -> post-processed flow segments.
// Each stage is also exposed as its own subcommand operating on the
// serialized artifacts of the previous stage.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "crowdseg/errors.hpp"
#include "crowdseg/image_io.hpp"
#include "crowdseg/pipeline.hpp"
#include "crowdseg/synthetic.hpp"

namespace fs = std::filesystem;
using namespace crowdseg;

namespace {

struct ConfigArgs {
  std::string config_file;
  std::vector<std::pair<std::string, std::string>> entries;  // applied in order
};

// Config file first, then command-line flags of the same names; flags win.
void add_config_flags(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("--config", args.config_file, "config file (key = value lines, # comments)");
  auto bind = [cmd, &args](const std::string& flag, const std::string& key,
                           const std::string& desc) {
    cmd->add_option_function<std::string>(
        flag, [&args, key](const std::string& v) { args.entries.emplace_back(key, v); }, desc);
  };
  bind("--smoothness", "flow.smoothness", "optical-flow smoothness weight");
  bind("--iterations", "flow.iterations", "optical-flow solver sweeps");
  bind("--window", "flow.window", "flow averaging window: all | sliding(n)");
  bind("--T", "advect.T", "integration length in frames");
  bind("--h", "advect.h", "integration step in frames");
  bind("--grid-step", "advect.gridStep", "particle grid spacing in px");
  bind("--mode", "advect.mode", "velocity source: steady | unsteady");
  bind("--sigma", "ftle.sigma", "FTLE Gaussian smoothing sigma in px");
  bind("--margin", "ftle.margin", "FTLE boundary strip margin in px");
  bind("--combine", "ftle.combine", "FTLE fusion: max | forward_only | backward_only");
  bind("--min-area", "seg.minArea", "minimum segment area in px");
  bind("--vacuum-threshold", "seg.vacuumThreshold", "vacuum-segment magnitude threshold");
  bind("--merge-angle", "seg.mergeAngleDeg", "segment merge angle threshold in degrees");
  bind("--merge-band", "seg.mergeBand", "boundary band width for merging in px");
}

PipelineConfig resolve_config(const ConfigArgs& args) {
  PipelineConfig cfg;
  if (!args.config_file.empty()) cfg = load_config(args.config_file);
  for (const auto& [key, value] : args.entries) apply_config_entry(cfg, key, value);
  validate_config(cfg);
  return cfg;
}

void run_synth(const ScenarioSpec& spec, std::uint64_t seed, const std::string& out_dir) {
  validate_scenario(spec);
  fs::create_directories(fs::path(out_dir) / "frames");
  const auto frames = gen_frames(spec, seed);
  for (size_t i = 0; i < frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%04zu.pgm", i);
    save_frame_pgm(frames[i], (fs::path(out_dir) / "frames" / name).string());
  }
  write_flo(gen_field(spec, 0.0), (fs::path(out_dir) / "field.flo").string());
  const LabelMap masks = ground_truth_masks(spec);
  if (masks.count > 0) {
    Gray8 img{masks.cols, masks.rows, {}};
    img.pixels.assign(masks.labels.begin(), masks.labels.end());
    write_pgm8(img, (fs::path(out_dir) / "mask.pgm").string());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crowd flow segmentation via particle advection and FTLE fields"};
  app.require_subcommand(1);

  // pipeline
  std::string frames_dir, out_dir;
  std::vector<std::string> flo_files;
  ConfigArgs pipe_cfg;
  auto* pipe = app.add_subcommand("pipeline", "run the full segmentation pipeline");
  auto* frames_opt = pipe->add_option("--frames", frames_dir, "directory of .pgm/.png frames");
  auto* flo_opt = pipe->add_option("--flo", flo_files, "precomputed .flo flow files");
  pipe->add_option("--out", out_dir, "output directory")->required();
  add_config_flags(pipe, pipe_cfg);

  // flow
  std::string fl_frames, fl_out;
  bool fl_spectrum = false;
  ConfigArgs fl_cfg;
  auto* flow_cmd = app.add_subcommand("flow", "estimate per-pair optical flow and the mean field");
  flow_cmd->add_option("--frames", fl_frames, "directory of .pgm/.png frames")->required();
  flow_cmd->add_option("--out", fl_out, "output directory")->required();
  flow_cmd->add_flag("--spectrum", fl_spectrum, "also write the FFT magnitude/phase spectrum");
  add_config_flags(flow_cmd, fl_cfg);

  // advect
  std::string ad_flow, ad_out;
  ConfigArgs ad_cfg;
  auto* advect_cmd = app.add_subcommand("advect", "advect the particle grid to flow maps");
  advect_cmd->add_option("--flow", ad_flow, "directory holding mean.flo / flow_*.flo")->required();
  advect_cmd->add_option("--out", ad_out, "output directory")->required();
  add_config_flags(advect_cmd, ad_cfg);

  // ftle
  std::string ft_maps, ft_out;
  ConfigArgs ft_cfg;
  auto* ftle_cmd = app.add_subcommand("ftle", "FTLE fields from flow maps");
  ftle_cmd->add_option("--fmaps", ft_maps, "directory holding forward.fmap / backward.fmap")
      ->required();
  ftle_cmd->add_option("--out", ft_out, "output directory")->required();
  add_config_flags(ftle_cmd, ft_cfg);

  // segment
  std::string sg_field, sg_flow, sg_frame, sg_out;
  ConfigArgs sg_cfg;
  auto* seg_cmd = app.add_subcommand("segment", "watershed + post-processing on an FTLE field");
  seg_cmd->add_option("--field", sg_field, "combined FTLE field (.sfld)")->required();
  seg_cmd->add_option("--flow", sg_flow, "mean flow field (.flo)")->required();
  seg_cmd->add_option("--frame", sg_frame, "frame for the overlay rendering");
  seg_cmd->add_option("--out", sg_out, "output directory")->required();
  add_config_flags(seg_cmd, sg_cfg);

  // synth
  ScenarioSpec spec;
  std::string sy_kind = "uniform", sy_out;
  std::uint64_t sy_seed = 1;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic scenario");
  synth_cmd->add_option("--kind", sy_kind,
                        "uniform | rotation | saddle | double_gyre | counter_flow | annulus")
      ->required();
  synth_cmd->add_option("--out", sy_out, "output directory")->required();
  synth_cmd->add_option("--width", spec.width, "image width");
  synth_cmd->add_option("--height", spec.height, "image height");
  synth_cmd->add_option("--frames", spec.frames, "number of frames to synthesize");
  synth_cmd->add_option("--seed", sy_seed, "texture seed");
  synth_cmd->add_option("--speed", spec.speed, "counter_flow/annulus speed (px/frame)");
  synth_cmd->add_option("--omega", spec.omega, "rotation rate (rad/frame)");
  synth_cmd->add_option("--rate", spec.rate, "saddle strength (1/frame)");
  synth_cmd->add_option("--ux", spec.ux, "uniform flow x component");
  synth_cmd->add_option("--uy", spec.uy, "uniform flow y component");
  synth_cmd->add_option("--inner", spec.inner_radius, "annulus inner radius (px)");
  synth_cmd->add_option("--outer", spec.outer_radius, "annulus outer radius (px)");
  synth_cmd->add_option("--cx", spec.center_x, "scenario center x (default: image center)");
  synth_cmd->add_option("--cy", spec.center_y, "scenario center y (default: image center)");
  synth_cmd->add_option("--gyre-a", spec.gyre_a, "double-gyre amplitude");
  synth_cmd->add_option("--gyre-eps", spec.gyre_eps, "double-gyre perturbation");
  synth_cmd->add_option("--gyre-omega", spec.gyre_omega, "double-gyre angular frequency");

  try {
    app.parse(argc, argv);

    if (pipe->parsed()) {
      const PipelineConfig cfg = resolve_config(pipe_cfg);
      if (frames_opt->count() > 0) {
        run_pipeline(list_frames(frames_dir), out_dir, cfg);
      } else if (flo_opt->count() > 0) {
        run_pipeline_flo(flo_files, out_dir, cfg);
      } else {
        std::fprintf(stderr, "crowdseg: pipeline needs --frames or --flo\n");
        return 1;
      }
    } else if (flow_cmd->parsed()) {
      flow_stage(list_frames(fl_frames), fl_out, resolve_config(fl_cfg), fl_spectrum);
    } else if (advect_cmd->parsed()) {
      advect_stage(ad_flow, ad_out, resolve_config(ad_cfg));
    } else if (ftle_cmd->parsed()) {
      ftle_stage(ft_maps, ft_out, resolve_config(ft_cfg));
    } else if (seg_cmd->parsed()) {
      segment_stage(sg_field, sg_flow, sg_frame, sg_out, resolve_config(sg_cfg));
    } else if (synth_cmd->parsed()) {
      if (sy_kind == "uniform") spec.kind = ScenarioKind::uniform;
      else if (sy_kind == "rotation") spec.kind = ScenarioKind::rotation;
      else if (sy_kind == "saddle") spec.kind = ScenarioKind::saddle;
      else if (sy_kind == "double_gyre") spec.kind = ScenarioKind::double_gyre;
      else if (sy_kind == "counter_flow") spec.kind = ScenarioKind::counter_flow;
      else if (sy_kind == "annulus") spec.kind = ScenarioKind::annulus;
      else throw ValueError("unknown scenario kind '" + sy_kind + "'");
      run_synth(spec, sy_seed, sy_out);
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "crowdseg: %s\n", e.what());
    return 1;
  } catch (const ValueError& e) {
    std::fprintf(stderr, "crowdseg: %s\n", e.what());
    return 1;
  } catch (const IoError& e) {
    std::fprintf(stderr, "crowdseg: %s\n", e.what());
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "crowdseg: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "crowdseg: %s\n", e.what());
    return 3;
  }
  return 0;
}
