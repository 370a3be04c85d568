#pragma once

#include <string>
#include <vector>

#include "crowdseg/config.hpp"

namespace crowdseg {

// Frame files (.pgm/.png) in a directory, sorted lexicographically by
// filename. Note zero-unpadded numbering ("frame2" after "frame10") will be
// reordered by this sort; pad your frame numbers.
std::vector<std::string> list_frames(const std::string& dir);

// Every stage reads its inputs from files and writes its outputs to files, so
// running stages one by one is bit-identical to run_pipeline.
//
// Artifacts (in out_dir): flow_%04d.flo per frame pair, mean.flo,
// window_%04d.flo (sliding window only), forward.fmap, backward.fmap,
// ftle_{forward,backward,combined}.sfld/.png, labels.pgm, labels.png,
// stats.jsonl, overlay.png.

void flow_stage(const std::vector<std::string>& frame_paths,
                const std::string& out_dir, const PipelineConfig& cfg,
                bool with_spectrum = false);

// Averages already-estimated fields instead of running the flow solver.
void flow_stage_from_flo(const std::vector<std::string>& flo_paths,
                         const std::string& out_dir, const PipelineConfig& cfg);

void advect_stage(const std::string& flow_dir, const std::string& out_dir,
                  const PipelineConfig& cfg);

void ftle_stage(const std::string& fmap_dir, const std::string& out_dir,
                const PipelineConfig& cfg);

// frame_path may be empty: the overlay rendering is skipped then.
void segment_stage(const std::string& field_path, const std::string& flow_path,
                   const std::string& frame_path, const std::string& out_dir,
                   const PipelineConfig& cfg);

void run_pipeline(const std::vector<std::string>& frame_paths,
                  const std::string& out_dir, const PipelineConfig& cfg);

void run_pipeline_flo(const std::vector<std::string>& flo_paths,
                      const std::string& out_dir, const PipelineConfig& cfg);

}  // namespace crowdseg
