#pragma once

#include "vdc/errors.hpp"
#include "vdc/spatial.hpp"

namespace vdc {

/// Geometry of one revolute segment: a planar 3-bar loop closed by a
/// linear cylinder between the q_j1 and q_j2 joints.
struct RevoluteSegmentGeom {
  double link_base = 0.0;     // L_j, q_j1 joint to q_j joint (m)
  double link_distal = 0.0;   // L_j1, q_j joint to q_j2 joint (m)
  double cyl_base_len = 0.0;  // x_j0, actuator length at zero stroke (m)
  double piston_len = 0.0;    // l_cj, piston plus rod length (m)
  double stroke = 0.0;        // s_j (m)

  // Mounting transform: parent tip frame -> B_cj. The tip-side attachment
  // lives with whatever follows (next segment's base_attach, the prismatic
  // attach, or the model-level end-effector transform).
  WrenchTransform base_attach;

  void validate() const;  // throws ModelError on bad lengths

  /// True when the triangle inequality holds strictly across the whole
  /// admissible stroke interval.
  bool stroke_admissible() const;
};

/// Loop-closure coordinates of one revolute segment and their rates.
/// Sign convention: q_j1 <= 0 and q_j2 <= 0, and on the physical branch
/// q_j = q_j1 + q_j2 in (-pi, 0).
struct ClosureState {
  double q = 0.0;    // rad, actuated joint
  double q1 = 0.0;   // rad, cylinder-case joint
  double q2 = 0.0;   // rad, piston-rod joint
  double x = 0.0;    // m, piston stroke
  double dq = 0.0;
  double dq1 = 0.0;
  double dq2 = 0.0;
  double dx = 0.0;
};

struct ClosureRates {
  double dx = 0.0;
  double dq1 = 0.0;
  double dq2 = 0.0;
};

struct ClosureAccels {
  double ddx = 0.0;
  double ddq1 = 0.0;
  double ddq2 = 0.0;
};

/// Piston stroke from the joint angle. Throws StrokeLimit when the result
/// leaves (0, stroke) and DegenerateTriangle when the radicand is negative.
double piston_from_angle(const RevoluteSegmentGeom& geom, double q);

/// Loop angles (q_j1, q_j2) from the piston stroke, both <= 0.
/// Arccos arguments within 1e-9 of [-1, 1] are clamped; beyond that a
/// DegenerateTriangle error is thrown.
std::pair<double, double> closure_angles(const RevoluteSegmentGeom& geom, double x);

/// Time derivatives of the closure functions given the joint rate.
ClosureRates closure_rates(const RevoluteSegmentGeom& geom, const ClosureState& pos, double dq);

/// Analytic second time derivatives of the closure functions.
ClosureAccels closure_accels(const RevoluteSegmentGeom& geom, const ClosureState& state,
                             double ddq);

/// Full closure state from (q, dq) on the physical branch.
ClosureState closure_from_angle(const RevoluteSegmentGeom& geom, double q, double dq);

}  // namespace vdc
