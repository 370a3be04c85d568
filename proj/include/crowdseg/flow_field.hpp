#pragma once

#include <string>
#include <vector>

#include "crowdseg/scalar_field.hpp"

namespace crowdseg {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Dense 2-D velocity field in pixels/frame: u is +x (rightward), v is +y
// (downward), both row-major on the image grid.
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<double> u;
  std::vector<double> v;

  double& u_at(int x, int y) { return u[static_cast<size_t>(y) * width + x]; }
  double u_at(int x, int y) const { return u[static_cast<size_t>(y) * width + x]; }
  double& v_at(int x, int y) { return v[static_cast<size_t>(y) * width + x]; }
  double v_at(int x, int y) const { return v[static_cast<size_t>(y) * width + x]; }
};

FlowField make_flow_field(int width, int height);

// Throws NumericError if any component is non-finite.
void validate_flow_field(const FlowField& f);

// Per-pixel arithmetic mean of a non-empty sequence of same-sized fields.
FlowField average_flow(const std::vector<FlowField>& fields);

// Bilinear interpolation from the four surrounding pixel centers; coordinates
// outside [0,width-1]x[0,height-1] are clamped to the boundary first.
Vec2 sample_bilinear(const FlowField& field, double x, double y);

// Per-pixel sqrt(u^2 + v^2).
ScalarField flow_magnitude(const FlowField& field);

// Middlebury .flo: float magic 202021.25, int32 width, int32 height, then
// row-major interleaved float32 (u,v) pairs, all little-endian.
FlowField read_flo(const std::string& path);
void write_flo(const FlowField& field, const std::string& path);

}  // namespace crowdseg
