#pragma once

#include <vector>

#include "vdc/controller.hpp"

namespace vdc {

/// Rest-to-rest fifth-order polynomial: zero velocity and acceleration at
/// both ends, clamped outside [0, T].
struct Quintic {
  double p0 = 0.0, p1 = 0.0, duration = 1.0;

  double pos(double t) const;
  double vel(double t) const;
  double acc(double t) const;
};

/// Joint angles of a planar two-segment manipulator reaching a tool-frame
/// target position in the world x-y plane. All attachment rotations must
/// be about z. elbow_up selects the branch of the inner-joint solution.
/// Throws Unreachable when the target lies outside the annulus or the
/// resulting angles violate the admissible stroke intervals, and
/// InvalidTopology for unsupported models.
std::vector<JointState> planar_ik(const ManipulatorModel& model, const Vec3& target_xy,
                                  bool elbow_up = true);

/// Piecewise rest-to-rest joint-space path through a waypoint list, one
/// leg per consecutive pair, each of the same duration, with an initial
/// hold. Evaluation outside the schedule clamps to the nearest endpoint.
class JointPath {
 public:
  JointPath(std::vector<std::vector<JointState>> waypoints, double leg_duration,
            double hold_time);

  TrajectorySample sample(double t) const;
  double total_time() const;

 private:
  std::vector<std::vector<JointState>> pts_;
  double leg_ = 1.0, hold_ = 0.0;
};

}  // namespace vdc
