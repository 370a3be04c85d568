#pragma once

// Shared helpers for the test suites.

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "crowdseg/flow_field.hpp"
#include "crowdseg/scalar_field.hpp"

namespace testutil {

// Unique temporary directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("crowdseg_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string str() const { return path_.string(); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::vector<char> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline bool same_bytes(const std::string& a, const std::string& b) {
  return read_bytes(a) == read_bytes(b);
}

// Deterministic uniform double in [lo, hi) independent of distribution
// implementations.
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double t = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + t * (hi - lo);
}

inline crowdseg::FlowField random_flow(int w, int h, std::uint64_t seed,
                                       double lo = -2.0, double hi = 2.0) {
  std::mt19937_64 rng(seed);
  crowdseg::FlowField f = crowdseg::make_flow_field(w, h);
  for (auto& x : f.u) x = uniform(rng, lo, hi);
  for (auto& x : f.v) x = uniform(rng, lo, hi);
  return f;
}

inline crowdseg::ScalarField random_scalar(int w, int h, std::uint64_t seed,
                                           double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  crowdseg::ScalarField f = crowdseg::make_scalar_field(w, h);
  for (auto& x : f.values) x = uniform(rng, lo, hi);
  return f;
}

// Smooth random field: sum of `bumps` Gaussians with random centers, widths
// and signed weights.
inline crowdseg::ScalarField random_smooth_field(int w, int h, int bumps,
                                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  crowdseg::ScalarField f = crowdseg::make_scalar_field(w, h);
  for (int b = 0; b < bumps; ++b) {
    const double cx = uniform(rng, 0.0, w - 1.0);
    const double cy = uniform(rng, 0.0, h - 1.0);
    const double sigma = uniform(rng, 8.0, 16.0);
    const double amp = uniform(rng, 0.5, 1.0) * ((rng() & 1) ? 1.0 : -1.0);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        f.at(x, y) += amp * std::exp(-0.5 * d2 / (sigma * sigma));
      }
  }
  return f;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace testutil
