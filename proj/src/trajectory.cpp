#include "vdc/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace vdc {

double Quintic::pos(double t) const {
  if (t <= 0.0) return p0;
  if (t >= duration) return p1;
  const double s = t / duration;
  return p0 + (p1 - p0) * (s * s * s * (10.0 + s * (-15.0 + 6.0 * s)));
}

double Quintic::vel(double t) const {
  if (t <= 0.0 || t >= duration) return 0.0;
  const double s = t / duration;
  return (p1 - p0) / duration * (s * s * (30.0 + s * (-60.0 + 30.0 * s)));
}

double Quintic::acc(double t) const {
  if (t <= 0.0 || t >= duration) return 0.0;
  const double s = t / duration;
  return (p1 - p0) / (duration * duration) * (s * (60.0 + s * (-180.0 + 120.0 * s)));
}

namespace {

using Cplx = std::complex<double>;

// Planar reduction of a rotation-about-z plus in-plane offset.
struct PlanarXf {
  double angle = 0.0;
  Cplx offset{0.0, 0.0};
};

PlanarXf planarize(const WrenchTransform& u) {
  if (std::abs(u.rotation(2, 2) - 1.0) > 1e-9 || std::abs(u.offset.z()) > 1e-9)
    throw InvalidTopology("planar solver needs z-rotations and in-plane offsets only");
  return {std::atan2(u.rotation(1, 0), u.rotation(0, 0)), {u.offset.x(), u.offset.y()}};
}

double wrap_pi(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a < -M_PI) a += 2.0 * M_PI;
  return a;
}

bool admissible(const RevoluteSegmentGeom& g, double q) {
  if (q >= 0.0 || q <= -M_PI) return false;
  try {
    piston_from_angle(g, q);
  } catch (const ModelError&) {
    return false;
  }
  return true;
}

}  // namespace

std::vector<JointState> planar_ik(const ManipulatorModel& model, const Vec3& target_xy,
                                  bool elbow_up) {
  if (model.structures.size() != 2 || model.structures[0].prismatic ||
      model.structures[1].prismatic)
    throw InvalidTopology("planar solver supports exactly two revolute segments");

  const PlanarXf a0 = planarize(model.structures[0].geom.base_attach);
  const PlanarXf a1 = planarize(model.structures[1].geom.base_attach);
  const PlanarXf ae = planarize(model.ee_attach);
  const double l0 = model.structures[0].geom.link_base;
  const double l01 = model.structures[0].geom.link_distal;
  const double l1 = model.structures[1].geom.link_base;
  const double l11 = model.structures[1].geom.link_distal;

  // Tool position as c0 + e^{i q0} (c1 + e^{i q1} c2).
  const Cplx e_b = std::polar(1.0, a0.angle);
  const Cplx c0 = a0.offset + e_b * l0;
  const Cplx c1 = e_b * (Cplx(l01, 0.0) + a1.offset + std::polar(1.0, a1.angle) * l1);
  const Cplx c2 = std::polar(1.0, a0.angle + a1.angle) * (Cplx(l11, 0.0) + ae.offset);

  const Cplx w = Cplx(target_xy.x(), target_xy.y()) - c0;
  const double r1 = std::abs(c1), r2 = std::abs(c2);
  const double cos_arg = (std::norm(w) - r1 * r1 - r2 * r2) / (2.0 * r1 * r2);
  if (cos_arg > 1.0 + 1e-12 || cos_arg < -1.0 - 1e-12) {
    std::ostringstream msg;
    msg << "target (" << target_xy.x() << ", " << target_xy.y() << ") outside reach";
    throw Unreachable(msg.str());
  }
  const double gamma = std::acos(std::clamp(cos_arg, -1.0, 1.0));
  const double phase = std::arg(c2) - std::arg(c1);

  for (const double sign : {elbow_up ? 1.0 : -1.0, elbow_up ? -1.0 : 1.0}) {
    const double q1 = wrap_pi(sign * gamma - phase);
    const double q0 = wrap_pi(std::arg(w) - std::arg(c1 + std::polar(1.0, q1) * c2));
    if (!admissible(model.structures[0].geom, q0) ||
        !admissible(model.structures[1].geom, q1))
      continue;
    std::vector<JointState> out(2);
    out[0].q = q0;
    out[1].q = q1;
    return out;
  }
  throw Unreachable("no admissible elbow branch reaches the target");
}

JointPath::JointPath(std::vector<std::vector<JointState>> waypoints, double leg_duration,
                     double hold_time)
    : pts_(std::move(waypoints)), leg_(leg_duration), hold_(hold_time) {
  if (pts_.empty()) throw ModelError("path needs at least one waypoint");
  if (leg_ <= 0.0 || hold_ < 0.0) throw ModelError("path timing must be positive");
}

double JointPath::total_time() const { return hold_ + leg_ * (pts_.size() - 1); }

TrajectorySample JointPath::sample(double t) const {
  const size_t n_joints = pts_.front().size();
  TrajectorySample out(n_joints);
  size_t leg = 0;
  double local = 0.0;
  if (t <= hold_ || pts_.size() == 1) {
    leg = 0;
    local = 0.0;
  } else {
    const double s = t - hold_;
    leg = std::min<size_t>(static_cast<size_t>(s / leg_), pts_.size() - 2);
    local = s - leg * leg_;
  }
  const std::vector<JointState>& a = pts_[leg];
  const std::vector<JointState>& b = pts_[std::min(leg + 1, pts_.size() - 1)];
  for (size_t j = 0; j < n_joints; ++j) {
    const Quintic qq{a[j].q, b[j].q, leg_};
    out[j].q = qq.pos(local);
    out[j].dq = qq.vel(local);
    out[j].ddq = qq.acc(local);
    const Quintic qx{a[j].xt, b[j].xt, leg_};
    out[j].xt = qx.pos(local);
    out[j].dxt = qx.vel(local);
    out[j].ddxt = qx.acc(local);
  }
  return out;
}

}  // namespace vdc
