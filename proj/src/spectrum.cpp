#include "crowdseg/spectrum.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <vector>

#include "crowdseg/errors.hpp"

namespace crowdseg {

FlowSpectrum flow_spectrum(const FlowField& field) {
  validate_flow_field(field);
  const int w = field.width, h = field.height;
  const size_t n = static_cast<size_t>(w) * h;

  std::vector<std::complex<double>> in(n), out(n);
  for (size_t i = 0; i < n; ++i) in[i] = {field.u[i], field.v[i]};

  fftw_plan plan = fftw_plan_dft_2d(h, w,
                                    reinterpret_cast<fftw_complex*>(in.data()),
                                    reinterpret_cast<fftw_complex*>(out.data()),
                                    FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  FlowSpectrum s;
  s.log_magnitude = make_scalar_field(w, h);
  s.phase = make_scalar_field(w, h);
  const int cx = w / 2, cy = h / 2;  // DC lands on the centered bin
  for (int ky = 0; ky < h; ++ky) {
    for (int kx = 0; kx < w; ++kx) {
      const std::complex<double> c = out[static_cast<size_t>(ky) * w + kx];
      const int sx = (kx + cx) % w, sy = (ky + cy) % h;
      const double mag = std::abs(c);
      s.log_magnitude.at(sx, sy) = std::log1p(mag);
      double ph = mag == 0.0 ? 0.0 : std::atan2(c.imag(), c.real());
      if (ph <= -M_PI) ph = M_PI;
      s.phase.at(sx, sy) = ph;
    }
  }
  return s;
}

}  // namespace crowdseg
