#include "crowdseg/frame.hpp"

#include <algorithm>
#include <cmath>

#include "crowdseg/errors.hpp"
#include "crowdseg/image_io.hpp"

namespace crowdseg {

Frame make_frame(int width, int height, double fill) {
  if (width <= 0 || height <= 0) throw ValueError("frame dimensions must be positive");
  Frame f;
  f.width = width;
  f.height = height;
  f.intensity.assign(static_cast<size_t>(width) * height, fill);
  return f;
}

void validate_frame(const Frame& f) {
  if (f.width < 8 || f.height < 8) throw ValueError("invalid frame");
  if (f.intensity.size() != static_cast<size_t>(f.width) * f.height)
    throw ValueError("invalid frame");
  for (double v : f.intensity)
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) throw ValueError("invalid frame");
}

double sample_frame_bilinear(const Frame& f, double x, double y) {
  double cx = std::clamp(x, 0.0, static_cast<double>(f.width - 1));
  double cy = std::clamp(y, 0.0, static_cast<double>(f.height - 1));
  int x0 = f.width > 1 ? std::min(static_cast<int>(std::floor(cx)), f.width - 2) : 0;
  int y0 = f.height > 1 ? std::min(static_cast<int>(std::floor(cy)), f.height - 2) : 0;
  int x1 = f.width > 1 ? x0 + 1 : 0;
  int y1 = f.height > 1 ? y0 + 1 : 0;
  double fx = cx - x0, fy = cy - y0;
  double top = (1.0 - fx) * f.at(x0, y0) + fx * f.at(x1, y0);
  double bot = (1.0 - fx) * f.at(x0, y1) + fx * f.at(x1, y1);
  return (1.0 - fy) * top + fy * bot;
}

namespace {

bool has_suffix(const std::string& s, const std::string& suffix) {
  if (s.size() < suffix.size()) return false;
  std::string tail = s.substr(s.size() - suffix.size());
  std::transform(tail.begin(), tail.end(), tail.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return tail == suffix;
}

Frame from_gray8(const Gray8& img) {
  Frame f = make_frame(img.width, img.height);
  for (size_t i = 0; i < img.pixels.size(); ++i)
    f.intensity[i] = img.pixels[i] / 255.0;
  return f;
}

Gray8 to_gray8(const Frame& f) {
  validate_frame(f);
  Gray8 img{f.width, f.height, {}};
  img.pixels.resize(f.intensity.size());
  for (size_t i = 0; i < f.intensity.size(); ++i)
    img.pixels[i] = static_cast<std::uint8_t>(std::lround(f.intensity[i] * 255.0));
  return img;
}

}  // namespace

Frame load_frame(const std::string& path) {
  Gray8 img;
  if (has_suffix(path, ".pgm"))
    img = read_pgm8(path);
  else if (has_suffix(path, ".png"))
    img = read_png_gray8(path);
  else
    throw IoError(path + ": unsupported frame format (expected .pgm or .png)");
  Frame f = from_gray8(img);
  validate_frame(f);
  return f;
}

void save_frame_pgm(const Frame& f, const std::string& path) {
  write_pgm8(to_gray8(f), path);
}

void save_frame_png(const Frame& f, const std::string& path) {
  write_png_gray8(to_gray8(f), path);
}

}  // namespace crowdseg
