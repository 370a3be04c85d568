#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "crowdseg/advection.hpp"
#include "crowdseg/flow_field.hpp"
#include "crowdseg/frame.hpp"
#include "crowdseg/scalar_field.hpp"

namespace crowdseg {

// Label 0 marks watershed lines and discarded segments; positive labels are
// kept contiguous 1..count. offset_x/offset_y place the grid inside the
// original image lattice (in grid units).
struct LabelMap {
  int cols = 0;
  int rows = 0;
  std::vector<int> labels;  // row-major
  int offset_x = 0;
  int offset_y = 0;
  int count = 0;

  int& at(int x, int y) { return labels[static_cast<size_t>(y) * cols + x]; }
  int at(int x, int y) const { return labels[static_cast<size_t>(y) * cols + x]; }
};

struct SegmentStats {
  int label = 0;
  long area = 0;
  Vec2 mean_flow;
  double mean_magnitude = 0.0;
  std::vector<std::pair<int, int>> boundary_pixels;  // (col,row), row-major order
};

// Flooding-from-minima watershed: regional minima (4-connected equal-height
// plateaus with no lower neighbor) become seeds in row-major discovery order,
// then pixels flood by ascending height through a priority queue ordered by
// (height, insertion sequence). A pixel reached from two or more distinct
// regions at once becomes 0 (watershed line). Deterministic.
LabelMap watershed(const ScalarField& height);

// Sets every positive label with area < min_area to 0, then compacts labels.
LabelMap remove_small_segments(const LabelMap& map, int min_area);

// Sets segments whose mean flow magnitude is below mag_threshold to 0
// (vacuum segments), then compacts labels. The flow grid must cover the
// map's offset-adjusted region.
LabelMap remove_vacuum_segments(const LabelMap& map, const FlowField& flow,
                                double mag_threshold);

// Merges adjacent segments whose mean flow directions near the shared
// boundary differ by less than angle_threshold (radians). Adjacency counts
// direct 4-neighbor contact and contact through width-1 ridge pixels; the
// direction is averaged over segment pixels within `band` px (4-connected
// geodesic distance inside the segment) of the shared boundary, ignoring
// pixels with magnitude <= 1e-6. Merging is transitive; ridge pixels lying
// between merged segments are absorbed.
LabelMap merge_similar_segments(const LabelMap& map, const FlowField& flow,
                                double angle_threshold, int band);

// Per-segment area, mean flow, mean per-pixel magnitude and boundary ring,
// sorted by label.
std::vector<SegmentStats> segment_stats(const LabelMap& map, const FlowField& flow);

// 16-bit big-endian PGM with labels as pixel values.
void write_label_pgm(const LabelMap& map, const std::string& path);
LabelMap read_label_pgm(const std::string& path);

// Color rendering: label 0 black, labels 1..count from a fixed 12-color
// palette, cycling.
void write_label_png(const LabelMap& map, const std::string& path);
const std::array<std::array<std::uint8_t, 3>, 12>& label_palette();

// JSON-lines stats: one object per segment with label, area, meanFlow,
// meanMagnitude.
void write_stats_jsonl(const std::vector<SegmentStats>& stats, const std::string& path);
std::vector<SegmentStats> read_stats_jsonl(const std::string& path);

// Segment colors alpha-blended over the frame; map pixels land at
// origin + (offset + index) * step of the particle grid they derive from.
void render_overlay_png(const LabelMap& map, const ParticleGrid& grid,
                        const Frame& frame, const std::string& path,
                        double alpha = 0.5);

}  // namespace crowdseg
