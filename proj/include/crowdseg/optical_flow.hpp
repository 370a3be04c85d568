#pragma once

#include "crowdseg/flow_field.hpp"
#include "crowdseg/frame.hpp"

namespace crowdseg {

// Dense optical flow between two consecutive frames: global-smoothness
// variational solver (Horn-Schunck) run as `iterations` Jacobi sweeps from a
// zero initial field. Spatial derivative stencils are averaged across the two
// frames. Deterministic for fixed inputs and parameters.
FlowField estimate_optical_flow(const Frame& prev, const Frame& next,
                                double smoothness, int iterations);

}  // namespace crowdseg
