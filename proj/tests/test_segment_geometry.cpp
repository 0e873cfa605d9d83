#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "vdc/segment_geometry.hpp"

using namespace vdc;

namespace {

std::mt19937 rng(7);

double urand(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

RevoluteSegmentGeom sample_geom() {
  RevoluteSegmentGeom g;
  g.link_base = 0.30;
  g.link_distal = 0.80;
  g.cyl_base_len = 0.55;
  g.piston_len = 0.35;
  g.stroke = 0.30;
  return g;
}

// Admissible joint angle range for a geometry, shrunk a little away from
// the stroke ends.
double rand_admissible_q(const RevoluteSegmentGeom& g) {
  const double lo_r = g.cyl_base_len + 0.02 * g.stroke;
  const double hi_r = g.cyl_base_len + 0.98 * g.stroke;
  auto q_of_r = [&](double r) {
    return -std::acos((r * r - g.link_base * g.link_base - g.link_distal * g.link_distal) /
                      (2.0 * g.link_base * g.link_distal));
  };
  return urand(q_of_r(lo_r), q_of_r(hi_r));
}

}  // namespace

TEST_CASE("piston length frozen values") {
  RevoluteSegmentGeom g;
  g.link_base = 1.0;
  g.link_distal = 1.0;
  g.cyl_base_len = 0.5;
  g.stroke = 1.6;  // wide enough to admit both probe angles
  g.piston_len = 0.3;
  CHECK(piston_from_angle(g, 0.0) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(piston_from_angle(g, M_PI / 2) == doctest::Approx(std::sqrt(2.0) - 0.5).epsilon(1e-12));
  CHECK_THROWS_AS(piston_from_angle(g, 0.9 * M_PI), StrokeLimit);
}

TEST_CASE("closure angles: equilateral and isoceles") {
  RevoluteSegmentGeom g;
  g.link_base = 1.0;
  g.link_distal = 1.0;
  g.cyl_base_len = 0.8;
  g.stroke = 0.5;
  g.piston_len = 0.3;
  const auto [q1, q2] = closure_angles(g, 0.2);  // r = 1: equilateral
  CHECK(q1 == doctest::Approx(-M_PI / 3).epsilon(1e-12));
  CHECK(q2 == doctest::Approx(-M_PI / 3).epsilon(1e-12));

  for (int i = 0; i < 10; ++i) {
    const double x = urand(0.01, 0.49);
    const auto [a1, a2] = closure_angles(g, x);
    CHECK(a1 == doctest::Approx(a2).epsilon(1e-12));  // isoceles symmetry
    CHECK(a1 <= 0.0);
  }
  CHECK_THROWS_AS(closure_angles(g, -0.1), StrokeLimit);
  CHECK_THROWS_AS(closure_angles(g, 0.6), StrokeLimit);
}

TEST_CASE("angle sum closes the triangle") {
  const RevoluteSegmentGeom g = sample_geom();
  for (int i = 0; i < 50; ++i) {
    const double q = rand_admissible_q(g);
    const double x = piston_from_angle(g, q);
    const auto [q1, q2] = closure_angles(g, x);
    CHECK(q1 + q2 == doctest::Approx(q).epsilon(1e-10));
    // Law-of-cosines residual of the reconstructed triangle.
    const double r = x + g.cyl_base_len;
    const double resid = g.link_distal * g.link_distal -
                         (r * r + g.link_base * g.link_base -
                          2.0 * r * g.link_base * std::cos(q1));
    CHECK(std::abs(resid) <= 1e-10);
  }
}

TEST_CASE("closure rate frozen value") {
  // Degenerate probe geometry: unit links, zero base length. Guards are
  // bypassed by handing the rate function a prebuilt state.
  RevoluteSegmentGeom g;
  g.link_base = 1.0;
  g.link_distal = 1.0;
  g.cyl_base_len = 1e-12;  // effectively zero
  g.stroke = 2.0;
  g.piston_len = 1e-13;
  ClosureState pos;
  pos.q = M_PI / 2;
  pos.x = std::sqrt(2.0);
  pos.q1 = -M_PI / 4;
  pos.q2 = -M_PI / 4;
  const ClosureRates r = closure_rates(g, pos, 1.0);
  CHECK(r.dx == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-9));

  CHECK(closure_rates(g, pos, 0.0).dx == 0.0);
  CHECK(closure_rates(g, pos, 0.0).dq1 == 0.0);
  CHECK(closure_rates(g, pos, 0.0).dq2 == 0.0);
}

TEST_CASE("closure rates match finite differences along a trajectory") {
  const RevoluteSegmentGeom g = sample_geom();
  for (int i = 0; i < 30; ++i) {
    const double q0 = rand_admissible_q(g);
    const double dq = urand(-1.0, 1.0);
    const double h = 1e-6;
    auto closure_at = [&](double dt) {
      const double x = piston_from_angle(g, q0 + dq * dt);
      const auto [q1, q2] = closure_angles(g, x);
      return std::array<double, 3>{x, q1, q2};
    };
    const auto lo = closure_at(-h), hi = closure_at(h);
    ClosureState pos;
    pos.q = q0;
    pos.x = piston_from_angle(g, q0);
    std::tie(pos.q1, pos.q2) = closure_angles(g, pos.x);
    const ClosureRates r = closure_rates(g, pos, dq);
    const double scale = std::max({1e-3, std::abs(r.dx), std::abs(r.dq1), std::abs(r.dq2)});
    CHECK(std::abs((hi[0] - lo[0]) / (2 * h) - r.dx) / scale <= 1e-6);
    CHECK(std::abs((hi[1] - lo[1]) / (2 * h) - r.dq1) / scale <= 1e-6);
    CHECK(std::abs((hi[2] - lo[2]) / (2 * h) - r.dq2) / scale <= 1e-6);
  }
}

TEST_CASE("closure accelerations match finite differences of the rates") {
  const RevoluteSegmentGeom g = sample_geom();
  for (int i = 0; i < 30; ++i) {
    const double q0 = rand_admissible_q(g);
    const double dq = urand(-1.0, 1.0);
    const double ddq = (i % 3 == 0) ? 0.0 : urand(-2.0, 2.0);  // include uniform rotation
    const double h = 1e-6;
    auto rates_at = [&](double dt) {
      ClosureState pos;
      pos.q = q0 + dq * dt + 0.5 * ddq * dt * dt;
      pos.x = piston_from_angle(g, pos.q);
      std::tie(pos.q1, pos.q2) = closure_angles(g, pos.x);
      return closure_rates(g, pos, dq + ddq * dt);
    };
    const ClosureRates lo = rates_at(-h), hi = rates_at(h);
    const ClosureState st = closure_from_angle(g, q0, dq);
    const ClosureAccels a = closure_accels(g, st, ddq);
    const double scale = std::max({1e-3, std::abs(a.ddx), std::abs(a.ddq1), std::abs(a.ddq2)});
    CHECK(std::abs((hi.dx - lo.dx) / (2 * h) - a.ddx) / scale <= 1e-5);
    CHECK(std::abs((hi.dq1 - lo.dq1) / (2 * h) - a.ddq1) / scale <= 1e-5);
    CHECK(std::abs((hi.dq2 - lo.dq2) / (2 * h) - a.ddq2) / scale <= 1e-5);
  }
}

TEST_CASE("trivial zero accelerations") {
  const RevoluteSegmentGeom g = sample_geom();
  const ClosureState st = closure_from_angle(g, rand_admissible_q(g), 0.0);
  const ClosureAccels a = closure_accels(g, st, 0.0);
  CHECK(a.ddx == 0.0);
  CHECK(a.ddq1 == 0.0);
  CHECK(a.ddq2 == 0.0);
}

TEST_CASE("piston rate sign follows -sin q on the admissible branch") {
  const RevoluteSegmentGeom g = sample_geom();
  for (int i = 0; i < 20; ++i) {
    const ClosureState st = closure_from_angle(g, rand_admissible_q(g), 1.0);
    CHECK(st.dx * (-std::sin(st.q)) >= 0.0);
  }
}

TEST_CASE("geometry validation") {
  RevoluteSegmentGeom g = sample_geom();
  CHECK_NOTHROW(g.validate());
  g.piston_len = g.cyl_base_len + 0.1;
  CHECK_THROWS_AS(g.validate(), ModelError);
  g = sample_geom();
  g.stroke = 5.0;  // blows through the triangle inequality
  CHECK_THROWS_AS(g.validate(), ModelError);
}
