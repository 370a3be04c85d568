#pragma once

#include <string>
#include <vector>

namespace crowdseg {

// Grayscale video frame with intensities in [0,1], row-major.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<double> intensity;

  double& at(int x, int y) { return intensity[static_cast<size_t>(y) * width + x]; }
  double at(int x, int y) const { return intensity[static_cast<size_t>(y) * width + x]; }
};

Frame make_frame(int width, int height, double fill = 0.0);

// Throws unless the frame is at least 8x8 with finite intensities in [0,1].
void validate_frame(const Frame& f);

// Bilinear intensity lookup with clamp-to-border coordinates.
double sample_frame_bilinear(const Frame& f, double x, double y);

// Loads a .pgm (P5, 8-bit) or .png (8-bit grayscale) frame; intensities are
// mapped to [0,1] by dividing by 255.
Frame load_frame(const std::string& path);
void save_frame_pgm(const Frame& f, const std::string& path);
void save_frame_png(const Frame& f, const std::string& path);

}  // namespace crowdseg
