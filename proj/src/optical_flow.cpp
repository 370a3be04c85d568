#include "crowdseg/optical_flow.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "crowdseg/errors.hpp"

namespace crowdseg {

namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

}  // namespace

FlowField estimate_optical_flow(const Frame& prev, const Frame& next,
                                double smoothness, int iterations) {
  if (prev.width != next.width || prev.height != next.height)
    throw ValueError("frame size mismatch");
  if (!(smoothness > 0.0)) throw ValueError("smoothness must be positive");
  if (iterations < 1) throw ValueError("iterations must be positive");
  for (double x : prev.intensity)
    if (!std::isfinite(x)) throw ValueError("invalid frame");
  for (double x : next.intensity)
    if (!std::isfinite(x)) throw ValueError("invalid frame");

  const int w = prev.width, h = prev.height;
  const size_t n = static_cast<size_t>(w) * h;
  std::vector<double> ex(n), ey(n), et(n);

  // Central-difference spatial gradients (edge-replicated), averaged across
  // the two frames; temporal derivative is the plain frame difference.
  for (int y = 0; y < h; ++y) {
    const int ym = clampi(y - 1, 0, h - 1), yp = clampi(y + 1, 0, h - 1);
    for (int x = 0; x < w; ++x) {
      const int xm = clampi(x - 1, 0, w - 1), xp = clampi(x + 1, 0, w - 1);
      const size_t i = static_cast<size_t>(y) * w + x;
      ex[i] = 0.25 * (prev.at(xp, y) - prev.at(xm, y) + next.at(xp, y) - next.at(xm, y));
      ey[i] = 0.25 * (prev.at(x, yp) - prev.at(x, ym) + next.at(x, yp) - next.at(x, ym));
      et[i] = next.at(x, y) - prev.at(x, y);
    }
  }

  std::vector<double> u(n, 0.0), v(n, 0.0), un(n), vn(n);
  const double alpha2 = smoothness * smoothness;

  for (int it = 0; it < iterations; ++it) {
    for (int y = 0; y < h; ++y) {
      const int ym = clampi(y - 1, 0, h - 1), yp = clampi(y + 1, 0, h - 1);
      for (int x = 0; x < w; ++x) {
        const int xm = clampi(x - 1, 0, w - 1), xp = clampi(x + 1, 0, w - 1);
        const size_t i = static_cast<size_t>(y) * w + x;
        // Horn-Schunck weighted neighborhood average: 1/6 for the 4-neighbors,
        // 1/12 for the diagonals (edge-replicated).
        auto idx = [&](int xx, int yy) { return static_cast<size_t>(yy) * w + xx; };
        double ubar = (u[idx(xm, y)] + u[idx(xp, y)] + u[idx(x, ym)] + u[idx(x, yp)]) / 6.0 +
                      (u[idx(xm, ym)] + u[idx(xp, ym)] + u[idx(xm, yp)] + u[idx(xp, yp)]) / 12.0;
        double vbar = (v[idx(xm, y)] + v[idx(xp, y)] + v[idx(x, ym)] + v[idx(x, yp)]) / 6.0 +
                      (v[idx(xm, ym)] + v[idx(xp, ym)] + v[idx(xm, yp)] + v[idx(xp, yp)]) / 12.0;
        const double num = ex[i] * ubar + ey[i] * vbar + et[i];
        const double den = alpha2 + ex[i] * ex[i] + ey[i] * ey[i];
        un[i] = ubar - ex[i] * num / den;
        vn[i] = vbar - ey[i] * num / den;
      }
    }
    u.swap(un);
    v.swap(vn);
  }

  FlowField f = make_flow_field(w, h);
  f.u = std::move(u);
  f.v = std::move(v);
  return f;
}

}  // namespace crowdseg
