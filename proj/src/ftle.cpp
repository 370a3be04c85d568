#include "crowdseg/ftle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crowdseg/errors.hpp"

namespace crowdseg {

JacobianGrid flow_map_gradient(const FlowMap& map) {
  if (map.cols < 3 || map.rows < 3) throw ValueError("flow map too small for gradients");
  JacobianGrid g;
  g.cols = map.cols - 2;
  g.rows = map.rows - 2;
  g.entries.resize(static_cast<size_t>(g.cols) * g.rows);
  const double ix = 1.0 / (2.0 * map.step_x);
  const double iy = 1.0 / (2.0 * map.step_y);
  for (int row = 1; row < map.rows - 1; ++row) {
    for (int col = 1; col < map.cols - 1; ++col) {
      Jacobian2x2 J;
      J.dxdX = (map.fx(col + 1, row) - map.fx(col - 1, row)) * ix;
      J.dxdY = (map.fx(col, row + 1) - map.fx(col, row - 1)) * iy;
      J.dydX = (map.fy(col + 1, row) - map.fy(col - 1, row)) * ix;
      J.dydY = (map.fy(col, row + 1) - map.fy(col, row - 1)) * iy;
      g.entries[static_cast<size_t>(row - 1) * g.cols + (col - 1)] = J;
    }
  }
  return g;
}

double ftle_from_jacobian(const Jacobian2x2& J, double T) {
  // Cauchy-Green tensor J^T J, then the closed-form largest eigenvalue of a
  // symmetric 2x2 matrix.
  const double d11 = J.dxdX * J.dxdX + J.dydX * J.dydX;
  const double d12 = J.dxdX * J.dxdY + J.dydX * J.dydY;
  const double d22 = J.dxdY * J.dxdY + J.dydY * J.dydY;
  const double mean = 0.5 * (d11 + d22);
  const double diff = 0.5 * (d11 - d22);
  double lmax = mean + std::sqrt(diff * diff + d12 * d12);
  constexpr double eps_eig = 1e-30;
  if (lmax <= eps_eig) lmax = eps_eig;
  return std::log(lmax) / (2.0 * T);
}

ScalarField compute_ftle_field(const FlowMap& map) {
  const JacobianGrid g = flow_map_gradient(map);
  const double T = std::abs(map.T);
  if (!(T > 0.0)) throw ValueError("flow map has zero integration length");
  ScalarField f = make_scalar_field(g.cols, g.rows);
  f.units = "1/frame";
  f.offset_x = 1;
  f.offset_y = 1;
  for (int y = 0; y < g.rows; ++y)
    for (int x = 0; x < g.cols; ++x)
      f.at(x, y) = ftle_from_jacobian(g.at(x, y), T);
  return f;
}

ScalarField gaussian_smooth(const ScalarField& field, double sigma) {
  if (!(sigma > 0.0)) throw ValueError("sigma must be positive");
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * r + 1);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    kernel[i + r] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += kernel[i + r];
  }
  for (double& k : kernel) k /= sum;

  const int w = field.cols, h = field.rows;
  auto clampi = [](int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); };

  ScalarField tmp = field;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += kernel[i + r] * field.at(clampi(x + i, w - 1), y);
      tmp.at(x, y) = acc;
    }
  }
  ScalarField out = field;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += kernel[i + r] * tmp.at(x, clampi(y + i, h - 1));
      out.at(x, y) = acc;
    }
  }
  return out;
}

ScalarField strip_boundary(const ScalarField& field, int margin) {
  if (margin < 0) throw ValueError("margin must be non-negative");
  if (2 * margin >= std::min(field.cols, field.rows))
    throw ValueError("margin too large for field");
  if (margin == 0) return field;
  ScalarField out = make_scalar_field(field.cols - 2 * margin, field.rows - 2 * margin);
  out.units = field.units;
  out.offset_x = field.offset_x + margin;
  out.offset_y = field.offset_y + margin;
  for (int y = 0; y < out.rows; ++y)
    for (int x = 0; x < out.cols; ++x)
      out.at(x, y) = field.at(x + margin, y + margin);
  return out;
}

ScalarField combine_ftle(const ScalarField& forward, const ScalarField& backward) {
  if (forward.cols != backward.cols || forward.rows != backward.rows ||
      forward.offset_x != backward.offset_x || forward.offset_y != backward.offset_y)
    throw ValueError("field size mismatch");
  ScalarField out = forward;
  for (size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = std::max(forward.values[i], backward.values[i]);
  return out;
}

std::vector<Peak> find_ftle_peaks(const ScalarField& field, double min_prominence) {
  if (field.cols < 3 || field.rows < 3) throw ValueError("field too small for peak search");
  if (!(min_prominence > 0.0)) throw ValueError("min_prominence must be positive");
  const double fmin = *std::min_element(field.values.begin(), field.values.end());
  const double floor_value = fmin + min_prominence;

  std::vector<Peak> peaks;
  for (int y = 1; y < field.rows - 1; ++y) {
    for (int x = 1; x < field.cols - 1; ++x) {
      const double v = field.at(x, y);
      if (v <= floor_value) continue;
      bool strict_max = true;
      for (int dy = -1; dy <= 1 && strict_max; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          if (field.at(x + dx, y + dy) >= v) {
            strict_max = false;
            break;
          }
        }
      if (strict_max) peaks.push_back({x, y, v});
    }
  }
  std::sort(peaks.begin(), peaks.end(), [&](const Peak& a, const Peak& b) {
    if (a.value != b.value) return a.value > b.value;
    return static_cast<long>(a.row) * field.cols + a.col <
           static_cast<long>(b.row) * field.cols + b.col;
  });
  return peaks;
}

}  // namespace crowdseg
