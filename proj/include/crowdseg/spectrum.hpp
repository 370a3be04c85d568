#pragma once

#include "crowdseg/flow_field.hpp"
#include "crowdseg/scalar_field.hpp"

namespace crowdseg {

// Magnitude and phase spectrum of the flow, treated as the complex field
// w = u + i*v. Diagnostic output only; nothing downstream consumes it.
struct FlowSpectrum {
  ScalarField log_magnitude;  // ln(1 + |W|), DC bin shifted to the grid center
  ScalarField phase;          // arg(W) in (-pi, pi], arg(0) defined as 0
};

FlowSpectrum flow_spectrum(const FlowField& field);

}  // namespace crowdseg
