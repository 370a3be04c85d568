#pragma once

#include <vector>

#include "crowdseg/advection.hpp"
#include "crowdseg/scalar_field.hpp"

namespace crowdseg {

// Partial derivatives of final position w.r.t. initial position (px/px).
struct Jacobian2x2 {
  double dxdX = 0.0;  // d finalX / d initialX
  double dxdY = 0.0;  // d finalX / d initialY
  double dydX = 0.0;
  double dydY = 0.0;
};

// Interior grid of flow-map Jacobians, (cols-2) x (rows-2) of the source map.
struct JacobianGrid {
  int cols = 0;
  int rows = 0;
  std::vector<Jacobian2x2> entries;  // row-major

  const Jacobian2x2& at(int x, int y) const {
    return entries[static_cast<size_t>(y) * cols + x];
  }
};

// Central differences of the flow map; boundary rows/columns have no centered
// stencil, so only the interior is returned.
JacobianGrid flow_map_gradient(const FlowMap& map);

// sigma = ln(lambda_max(J^T J)) / (2T), the largest-stretch exponent of the
// Cauchy-Green tensor. lambda_max <= 1e-30 is collapsed to 1e-30 so degenerate
// maps stay finite.
double ftle_from_jacobian(const Jacobian2x2& J, double T);

// FTLE over the map interior; |T| from the map is used for both directions.
ScalarField compute_ftle_field(const FlowMap& map);

// Separable Gaussian convolution, kernel radius ceil(3*sigma), kernel
// normalized to sum 1, borders edge-replicated.
ScalarField gaussian_smooth(const ScalarField& field, double sigma);

// Crops `margin` pixels from every side; the offset is carried so results map
// back to image coordinates.
ScalarField strip_boundary(const ScalarField& field, int margin);

// Pointwise maximum of the forward and backward FTLE fields.
ScalarField combine_ftle(const ScalarField& forward, const ScalarField& backward);

struct Peak {
  int col = 0;
  int row = 0;
  double value = 0.0;
};

// Strict local maxima over full 8-neighborhoods exceeding
// (field minimum + min_prominence), sorted by descending value, ties broken by
// row-major position.
std::vector<Peak> find_ftle_peaks(const ScalarField& field, double min_prominence);

}  // namespace crowdseg
