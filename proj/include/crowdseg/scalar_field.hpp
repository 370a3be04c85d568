#pragma once

#include <string>
#include <vector>

namespace crowdseg {

// Real-valued grid (FTLE fields, magnitudes, smoothed fields). offset_x/offset_y
// record where this grid sits inside the original image lattice so cropped
// fields can be mapped back; the SFLD file format does not store them (staged
// runs reconstruct the offset from the pipeline config).
struct ScalarField {
  int cols = 0;
  int rows = 0;
  std::vector<double> values;  // row-major
  std::string units;
  int offset_x = 0;
  int offset_y = 0;

  double& at(int x, int y) { return values[static_cast<size_t>(y) * cols + x]; }
  double at(int x, int y) const { return values[static_cast<size_t>(y) * cols + x]; }
};

ScalarField make_scalar_field(int cols, int rows, double fill = 0.0);

// Throws NumericError if any value is non-finite.
void validate_scalar_field(const ScalarField& f);

// SFLD: "SFLD" magic, uint16 cols, uint16 rows, 4 pad bytes, then row-major
// little-endian float32 values.
ScalarField read_sfld(const std::string& path);
void write_sfld(const ScalarField& f, const std::string& path);

// Min-max normalized 8-bit grayscale rendering.
void render_scalar_png(const ScalarField& f, const std::string& path);

}  // namespace crowdseg
