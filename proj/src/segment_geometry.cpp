#include "vdc/segment_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vdc {

namespace {

constexpr double kClampBand = 1e-9;
constexpr double kSinGuard = 1e-8;

double guarded_acos(double arg, const char* what) {
  if (arg > 1.0 + kClampBand || arg < -1.0 - kClampBand) {
    std::ostringstream msg;
    msg << "degenerate closure triangle: " << what << " arccos argument " << arg;
    throw DegenerateTriangle(msg.str());
  }
  return std::acos(std::clamp(arg, -1.0, 1.0));
}

}  // namespace

void RevoluteSegmentGeom::validate() const {
  if (link_base <= 0.0 || link_distal <= 0.0 || cyl_base_len <= 0.0 || stroke <= 0.0)
    throw ModelError("revolute segment lengths must be positive");
  if (piston_len <= 0.0 || piston_len >= cyl_base_len)
    throw ModelError("piston length must satisfy 0 < l_c < x_0");
  if (!stroke_admissible())
    throw ModelError("stroke interval violates the closure triangle inequality");
}

bool RevoluteSegmentGeom::stroke_admissible() const {
  const double lo = cyl_base_len;           // x -> 0
  const double hi = stroke + cyl_base_len;  // x -> s
  return std::abs(link_base - link_distal) < lo && hi < link_base + link_distal;
}

double piston_from_angle(const RevoluteSegmentGeom& geom, double q) {
  const double lj = geom.link_base;
  const double lj1 = geom.link_distal;
  const double rad = lj * lj + lj1 * lj1 + 2.0 * lj * lj1 * std::cos(q);
  if (rad <= 0.0) throw DegenerateTriangle("closure triangle collapsed");
  const double x = std::sqrt(rad) - geom.cyl_base_len;
  if (x <= 0.0 || x >= geom.stroke) {
    std::ostringstream msg;
    msg << "piston stroke " << x << " outside (0, " << geom.stroke << ")";
    throw StrokeLimit(msg.str());
  }
  return x;
}

std::pair<double, double> closure_angles(const RevoluteSegmentGeom& geom, double x) {
  if (x <= 0.0 || x >= geom.stroke) throw StrokeLimit("piston stroke outside admissible interval");
  const double r = x + geom.cyl_base_len;
  const double lj = geom.link_base;
  const double lj1 = geom.link_distal;
  const double q1 = -guarded_acos((lj1 * lj1 - r * r - lj * lj) / (-2.0 * r * lj), "q_j1");
  const double q2 = -guarded_acos((lj * lj - r * r - lj1 * lj1) / (-2.0 * r * lj1), "q_j2");
  return {q1, q2};
}

ClosureRates closure_rates(const RevoluteSegmentGeom& geom, const ClosureState& pos, double dq) {
  const double s1 = std::sin(pos.q1);
  const double s2 = std::sin(pos.q2);
  if (std::abs(s1) < kSinGuard || std::abs(s2) < kSinGuard)
    throw ClosureSingularity("closure angle too close to the singular set");
  const double r = pos.x + geom.cyl_base_len;
  const double lj = geom.link_base;
  const double lj1 = geom.link_distal;
  ClosureRates out;
  out.dx = -lj * lj1 * std::sin(pos.q) / r * dq;
  out.dq1 = -(r - lj * std::cos(pos.q1)) / (r * lj * s1) * out.dx;
  out.dq2 = -(r - lj1 * std::cos(pos.q2)) / (r * lj1 * s2) * out.dx;
  return out;
}

ClosureAccels closure_accels(const RevoluteSegmentGeom& geom, const ClosureState& st,
                             double ddq) {
  const double s1 = std::sin(st.q1);
  const double s2 = std::sin(st.q2);
  if (std::abs(s1) < kSinGuard || std::abs(s2) < kSinGuard)
    throw ClosureSingularity("closure angle too close to the singular set");
  const double r = st.x + geom.cyl_base_len;
  const double lj = geom.link_base;
  const double lj1 = geom.link_distal;
  const double c1 = std::cos(st.q1);
  const double c2 = std::cos(st.q2);
  const double sq = std::sin(st.q);
  const double cq = std::cos(st.q);

  // x(t): dx = -L L1 sin(q)/r * dq, with dr/dt = dx.
  const double jac = -lj * lj1 * sq / r;
  const double djac = -lj * lj1 * cq * st.dq / r + lj * lj1 * sq * st.dx / (r * r);
  ClosureAccels out;
  out.ddx = djac * st.dq + jac * ddq;

  // q1(t): dq1 = g1(r, q1) dx.
  const double g1 = -(r - lj * c1) / (r * lj * s1);
  const double dg1_dr = -c1 / (r * r * s1);
  const double dg1_dq1 = (r * c1 - lj) / (r * lj * s1 * s1);
  const double dg1 = dg1_dr * st.dx + dg1_dq1 * st.dq1;
  out.ddq1 = dg1 * st.dx + g1 * out.ddx;

  const double g2 = -(r - lj1 * c2) / (r * lj1 * s2);
  const double dg2_dr = -c2 / (r * r * s2);
  const double dg2_dq2 = (r * c2 - lj1) / (r * lj1 * s2 * s2);
  const double dg2 = dg2_dr * st.dx + dg2_dq2 * st.dq2;
  out.ddq2 = dg2 * st.dx + g2 * out.ddx;
  return out;
}

ClosureState closure_from_angle(const RevoluteSegmentGeom& geom, double q, double dq) {
  ClosureState st;
  st.q = q;
  st.dq = dq;
  st.x = piston_from_angle(geom, q);
  std::tie(st.q1, st.q2) = closure_angles(geom, st.x);
  const ClosureRates rates = closure_rates(geom, st, dq);
  st.dx = rates.dx;
  st.dq1 = rates.dq1;
  st.dq2 = rates.dq2;
  return st;
}

}  // namespace vdc
