#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crowdseg/advection.hpp"
#include "crowdseg/errors.hpp"
#include "crowdseg/synthetic.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace crowdseg;

namespace {

constexpr Extent kBig{1000.0, 1000.0};

struct ConstantVel {
  double u, v;
  Vec2 operator()(double, double, double) const { return {u, v}; }
};

struct SaddleVel {
  double cx, cy, a;
  Vec2 operator()(double x, double y, double) const {
    return {a * (x - cx), -a * (y - cy)};
  }
};

}  // namespace

TEST_CASE("rk4_step keeps position in a zero field") {
  const auto p = rk4_step(ConstantVel{0.0, 0.0}, {5.5, 7.25}, 0.0, 1.0, 1.0, kBig);
  CHECK(p.x == 5.5);
  CHECK(p.y == 7.25);
}

TEST_CASE("rk4_step is exact for constant velocity") {
  const auto p = rk4_step(ConstantVel{1.0, 0.0}, {5.0, 5.0}, 0.0, 1.0, 1.0, kBig);
  CHECK(p.x == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(p.y == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("rk4_step matches the saddle closed form to O(h^5)") {
  const double c = 50.0, a = 0.05, h = 1.0;
  const SaddleVel vel{c, c, a};
  const Vec2 p0{57.0, 44.0};
  const Vec2 got = rk4_step(vel, p0, 0.0, h, 1.0, kBig);
  const Vec2 want = oracles::saddle_solution(p0, c, c, a, h);
  CHECK(std::abs(got.x - want.x) < 1e-7);
  CHECK(std::abs(got.y - want.y) < 1e-7);
}

TEST_CASE("rk4_step clamps the result to the domain") {
  const Extent dom{10.0, 10.0};
  const auto p = rk4_step(ConstantVel{100.0, -100.0}, {5.0, 5.0}, 0.0, 1.0, 1.0, dom);
  CHECK(p.x == 9.0);
  CHECK(p.y == 0.0);
}

TEST_CASE("integration spec rounds T to a multiple of h") {
  const IntegrationSpec s1 = make_integration_spec(10.2, 0.5);
  CHECK(s1.steps == 20);
  CHECK(s1.T == doctest::Approx(10.0));
  const IntegrationSpec s2 = make_integration_spec(10.3, 0.5);
  CHECK(s2.steps == 21);
  CHECK(s2.T == doctest::Approx(10.5));
  CHECK_THROWS_AS(make_integration_spec(-1.0, 0.5), ValueError);
  CHECK_THROWS_AS(make_integration_spec(1.0, 2.0), ValueError);
}

TEST_CASE("advect_grid through a zero field is the identity map") {
  const FlowField zero = make_flow_field(32, 32);
  const ParticleGrid grid = make_pixel_grid(32, 32);
  for (Direction dir : {Direction::forward, Direction::backward}) {
    const FlowMap m = advect_grid(SteadySampler{&zero}, extent_of(zero), grid,
                                  make_integration_spec(10.0, 0.5, dir));
    for (int row = 0; row < grid.rows; ++row)
      for (int col = 0; col < grid.cols; ++col) {
        CHECK(m.fx(col, row) == static_cast<double>(col));
        CHECK(m.fy(col, row) == static_cast<double>(row));
      }
  }
}

TEST_CASE("advect_grid through a constant field translates and clamps") {
  FlowField f = make_flow_field(32, 32);
  for (auto& x : f.u) x = 1.0;
  const ParticleGrid grid = make_pixel_grid(32, 32);
  const FlowMap m = advect_grid(SteadySampler{&f}, extent_of(f), grid,
                                make_integration_spec(10.0, 1.0));
  for (int row = 0; row < grid.rows; ++row)
    for (int col = 0; col < grid.cols; ++col) {
      const double expect = std::min(col + 10.0, 31.0);
      CHECK(m.fx(col, row) == doctest::Approx(expect).epsilon(1e-12));
      CHECK(m.fy(col, row) == doctest::Approx(static_cast<double>(row)).epsilon(1e-12));
    }
}

TEST_CASE("advect_grid follows rigid-rotation trajectories") {
  const int n = 64;
  ScenarioSpec spec;
  spec.kind = ScenarioKind::rotation;
  spec.width = spec.height = n;
  spec.omega = 0.05;
  const FlowField f = gen_field(spec, 0.0);
  const ParticleGrid grid = make_pixel_grid(n, n);
  const double T = 20.0;
  const FlowMap m = advect_grid(SteadySampler{&f}, extent_of(f), grid,
                                make_integration_spec(T, 0.5));
  const double c = (n - 1) / 2.0;
  int checked = 0;
  for (int row = 0; row < n; ++row)
    for (int col = 0; col < n; ++col) {
      const double r0 = std::hypot(col - c, row - c);
      if (r0 > 0.35 * n || r0 < 2.0) continue;  // interior trajectories only
      const double r1 = std::hypot(m.fx(col, row) - c, m.fy(col, row) - c);
      CHECK(std::abs(r1 - r0) < 1e-3);
      const double a0 = std::atan2(row - c, col - c);
      const double a1 = std::atan2(m.fy(col, row) - c, m.fx(col, row) - c);
      double da = a1 - a0 - spec.omega * T;
      da = std::atan2(std::sin(da), std::cos(da));
      CHECK(std::abs(da) < 1e-3);
      ++checked;
    }
  CHECK(checked > 500);
}

TEST_CASE("advect_grid rejects grids outside the domain") {
  const FlowField f = make_flow_field(16, 16);
  ParticleGrid grid = make_pixel_grid(16, 16);
  grid.origin_x = -2.0;
  CHECK_THROWS_WITH_AS(advect_grid(SteadySampler{&f}, extent_of(f), grid,
                                   make_integration_spec(1.0, 0.5)),
                       "grid exceeds field", ValueError);
}

TEST_CASE("advect_both translates both ways") {
  FlowField f = make_flow_field(32, 32);
  for (auto& x : f.u) x = 1.0;
  const ParticleGrid grid = make_pixel_grid(32, 32);
  const auto [fwd, bwd] = advect_both(SteadySampler{&f}, extent_of(f), grid, 5.0, 1.0);
  CHECK(fwd.direction == Direction::forward);
  CHECK(bwd.direction == Direction::backward);
  for (int col = 0; col < 32; ++col) {
    CHECK(fwd.fx(col, 16) == doctest::Approx(std::min(col + 5.0, 31.0)).epsilon(1e-12));
    CHECK(bwd.fx(col, 16) == doctest::Approx(std::max(col - 5.0, 0.0)).epsilon(1e-12));
  }
}

TEST_CASE("advect_both matches the saddle closed form both ways") {
  const double c = 31.5, a = 0.05, T = 10.0;
  const SaddleVel vel{c, c, a};
  ParticleGrid grid;
  grid.origin_x = grid.origin_y = 24.0;
  grid.cols = grid.rows = 16;
  const auto [fwd, bwd] = advect_both(vel, Extent{64.0, 64.0}, grid, T, 0.5);
  for (int row = 0; row < grid.rows; ++row)
    for (int col = 0; col < grid.cols; ++col) {
      const Vec2 p0 = grid.initial(col, row);
      const Vec2 wf = oracles::saddle_solution(p0, c, c, a, T);
      const Vec2 wb = oracles::saddle_solution(p0, c, c, a, -T);
      CHECK(std::abs(fwd.fx(col, row) - wf.x) < 1e-6);
      CHECK(std::abs(fwd.fy(col, row) - wf.y) < 1e-6);
      CHECK(std::abs(bwd.fx(col, row) - wb.x) < 1e-6);
      CHECK(std::abs(bwd.fy(col, row) - wb.y) < 1e-6);
    }
}

TEST_CASE("halving h cuts rotation trajectory error by >= 12") {
  const int n = 64;
  ScenarioSpec spec;
  spec.kind = ScenarioKind::rotation;
  spec.width = spec.height = n;
  spec.omega = 0.05;
  const FlowField f = gen_field(spec, 0.0);
  const ParticleGrid grid = make_pixel_grid(n, n);
  const double T = 20.0, c = (n - 1) / 2.0;

  auto max_error = [&](double h) {
    const FlowMap m = advect_grid(SteadySampler{&f}, extent_of(f), grid,
                                  make_integration_spec(T, h));
    double worst = 0.0;
    for (int row = 0; row < n; ++row)
      for (int col = 0; col < n; ++col) {
        if (std::hypot(col - c, row - c) > 0.35 * n) continue;
        const Vec2 want = oracles::rotation_solution({double(col), double(row)}, c, c,
                                                     spec.omega, T);
        worst = std::max(worst, std::hypot(m.fx(col, row) - want.x,
                                           m.fy(col, row) - want.y));
      }
    return worst;
  };

  const double e1 = max_error(1.0);
  const double e05 = max_error(0.5);
  CHECK(e1 / e05 >= 12.0);
}

TEST_CASE("steady advection composes over time") {
  // T then T' equals T + T' when no clamping is active.
  FlowField f = make_flow_field(64, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      f.u_at(x, y) = 0.02 * (y - 31.5);
      f.v_at(x, y) = -0.02 * (x - 31.5);
    }
  ParticleGrid grid;
  grid.origin_x = grid.origin_y = 24.0;
  grid.cols = grid.rows = 16;
  const Extent dom = extent_of(f);
  const SteadySampler vel{&f};

  const FlowMap full = advect_grid(vel, dom, grid, make_integration_spec(8.0, 0.5));
  const FlowMap part = advect_grid(vel, dom, grid, make_integration_spec(3.0, 0.5));
  ParticleGrid moved = grid;  // restart from the intermediate positions
  FlowMap rest;
  rest.cols = grid.cols;
  rest.rows = grid.rows;
  rest.final_x.resize(part.final_x.size());
  rest.final_y.resize(part.final_y.size());
  for (size_t i = 0; i < part.final_x.size(); ++i) {
    Vec2 p{part.final_x[i], part.final_y[i]};
    for (int s = 0; s < 10; ++s) p = rk4_step(vel, p, s * 0.5, 0.5, 1.0, dom);
    rest.final_x[i] = p.x;
    rest.final_y[i] = p.y;
  }
  for (size_t i = 0; i < full.final_x.size(); ++i) {
    CHECK(std::abs(full.final_x[i] - rest.final_x[i]) < 1e-9);
    CHECK(std::abs(full.final_y[i] - rest.final_y[i]) < 1e-9);
  }
}

TEST_CASE("every flow map coordinate stays in the clamped domain") {
  const FlowField f = testutil::random_flow(24, 20, 13, -3.0, 3.0);
  const ParticleGrid grid = make_pixel_grid(24, 20);
  for (Direction dir : {Direction::forward, Direction::backward}) {
    const FlowMap m = advect_grid(SteadySampler{&f}, extent_of(f), grid,
                                  make_integration_spec(15.0, 0.5, dir));
    for (size_t i = 0; i < m.final_x.size(); ++i) {
      CHECK(m.final_x[i] >= 0.0);
      CHECK(m.final_x[i] <= 23.0);
      CHECK(m.final_y[i] >= 0.0);
      CHECK(m.final_y[i] <= 19.0);
    }
  }
}

TEST_CASE("unsteady sampler indexes frames by floor(t), reversed when backward") {
  FlowField fx = make_flow_field(32, 32);
  for (auto& x : fx.u) x = 1.0;
  FlowField fy = make_flow_field(32, 32);
  for (auto& x : fy.v) x = 1.0;
  const std::vector<FlowField> seq{fx, fy};

  const SequenceSampler fwd_vel{&seq, false};
  CHECK(fwd_vel(5.0, 5.0, 0.3).x == 1.0);  // field 0
  CHECK(fwd_vel(5.0, 5.0, 0.3).y == 0.0);
  CHECK(fwd_vel(5.0, 5.0, 1.7).y == 1.0);  // field 1
  CHECK(fwd_vel(5.0, 5.0, 9.0).y == 1.0);  // clamped to the last field

  const SequenceSampler bwd_vel{&seq, true};
  CHECK(bwd_vel(5.0, 5.0, 0.3).y == 1.0);  // elapsed 0 -> last field
  CHECK(bwd_vel(5.0, 5.0, 1.2).x == 1.0);  // elapsed 1 -> first field

  const ParticleGrid grid = make_pixel_grid(32, 32);
  const Extent dom{32.0, 32.0};
  // Hand-derived from the floor(t) rule with T=2, h=1: the forward step 0
  // evaluates the k4 stage at t=1, which already lies in field 1, giving the
  // displacement (5/6, 1/6); step 1 runs entirely in field 1, adding (0, 1).
  const FlowMap fwd = advect_grid(fwd_vel, dom, grid,
                                  make_integration_spec(2.0, 1.0, Direction::forward,
                                                        FlowMode::unsteady));
  CHECK(fwd.fx(10, 10) == doctest::Approx(10.0 + 5.0 / 6.0).epsilon(1e-12));
  CHECK(fwd.fy(10, 10) == doctest::Approx(10.0 + 7.0 / 6.0).epsilon(1e-12));

  // Backward mirrors the roles: (-1/6 - 1, -5/6).
  const FlowMap bwd = advect_grid(bwd_vel, dom, grid,
                                  make_integration_spec(2.0, 1.0, Direction::backward,
                                                        FlowMode::unsteady));
  CHECK(bwd.fx(10, 10) == doctest::Approx(10.0 - 7.0 / 6.0).epsilon(1e-12));
  CHECK(bwd.fy(10, 10) == doctest::Approx(10.0 - 5.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("unsteady advection with identical fields matches steady advection") {
  const FlowField f = testutil::random_flow(24, 24, 21, -0.5, 0.5);
  const std::vector<FlowField> seq{f, f, f, f, f};
  const ParticleGrid grid = make_pixel_grid(24, 24);
  const FlowMap steady = advect_grid(SteadySampler{&f}, extent_of(f), grid,
                                     make_integration_spec(5.0, 0.5));
  const FlowMap unsteady = advect_grid(SequenceSampler{&seq, false}, extent_of(f), grid,
                                       make_integration_spec(5.0, 0.5, Direction::forward,
                                                             FlowMode::unsteady));
  CHECK(steady.final_x == unsteady.final_x);
  CHECK(steady.final_y == unsteady.final_y);
}
