#include "vdc/spatial.hpp"

#include <cmath>

namespace vdc {

Mat3 skew(const Vec3& r) {
  Mat3 m;
  m << 0, -r.z(), r.y(),
       r.z(), 0, -r.x(),
       -r.y(), r.x(), 0;
  return m;
}

WrenchTransform WrenchTransform::rot_z(double angle, const Vec3& offset) {
  WrenchTransform u;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  u.rotation << c, -s, 0,
                s, c, 0,
                0, 0, 1;
  u.offset = offset;
  return u;
}

Mat6 WrenchTransform::as_matrix() const {
  Mat6 u = Mat6::Zero();
  u.topLeftCorner<3, 3>() = rotation;
  u.bottomLeftCorner<3, 3>() = skew(offset) * rotation;
  u.bottomRightCorner<3, 3>() = rotation;
  return u;
}

bool WrenchTransform::well_formed(double tol) const {
  const Mat3 rtr = rotation.transpose() * rotation;
  return (rtr - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(rotation.determinant() - 1.0) <= tol;
}

WrenchTransform WrenchTransform::operator*(const WrenchTransform& other) const {
  WrenchTransform u;
  u.rotation = rotation * other.rotation;
  u.offset = offset + rotation * other.offset;
  return u;
}

SpatialVec transform_velocity(const WrenchTransform& u, const SpatialVec& v_parent) {
  const Vec3 v = v_parent.head<3>();
  const Vec3 w = v_parent.tail<3>();
  SpatialVec out;
  out.head<3>() = u.rotation.transpose() * (v + w.cross(u.offset));
  out.tail<3>() = u.rotation.transpose() * w;
  return out;
}

SpatialVec transform_wrench(const WrenchTransform& u, const SpatialVec& f_child) {
  const Vec3 f = u.rotation * f_child.head<3>();
  const Vec3 m = u.rotation * f_child.tail<3>();
  SpatialVec out;
  out.head<3>() = f;
  out.tail<3>() = m + u.offset.cross(f);
  return out;
}

Mat6 BodyParams::mass_matrix() const {
  Mat6 m = Mat6::Zero();
  m.topLeftCorner<3, 3>() = mass * Mat3::Identity();
  m.topRightCorner<3, 3>() = -mass * skew(com_offset);
  m.bottomLeftCorner<3, 3>() = mass * skew(com_offset);
  m.bottomRightCorner<3, 3>() = inertia;
  return m;
}

bool BodyParams::well_formed(double tol) const {
  if (mass < 0.0) return false;
  if ((inertia - inertia.transpose()).cwiseAbs().maxCoeff() > tol) return false;
  Eigen::SelfAdjointEigenSolver<Mat3> es(inertia);
  return es.eigenvalues().minCoeff() >= -tol;
}

namespace {

// Coriolis/centrifugal matrix C_A(w) for the linear-then-angular ordering.
Mat6 coriolis_matrix(const BodyParams& body, const Vec3& w) {
  const Mat3 sw = skew(w);
  const Mat3 sc = skew(body.com_offset);
  Mat6 c = Mat6::Zero();
  c.topLeftCorner<3, 3>() = body.mass * sw;
  c.topRightCorner<3, 3>() = -body.mass * sw * sc;
  c.bottomLeftCorner<3, 3>() = body.mass * sc * sw;
  c.bottomRightCorner<3, 3>() = sw * body.inertia;
  return c;
}

SpatialVec gravity_wrench(const BodyParams& body, const Mat3& frame_orientation_world) {
  const Vec3 g_local = frame_orientation_world.transpose() * body.gravity_world;
  SpatialVec g;
  g.head<3>() = -body.mass * g_local;
  g.tail<3>() = -body.mass * body.com_offset.cross(g_local);
  return g;
}

}  // namespace

SpatialVec net_wrench(const BodyParams& body, const Mat3& frame_orientation_world,
                      const SpatialVec& v, const SpatialVec& dv) {
  return body.mass_matrix() * dv + coriolis_matrix(body, v.tail<3>()) * v +
         gravity_wrench(body, frame_orientation_world);
}

SpatialVec required_net_wrench(const BodyParams& body, const Mat3& frame_orientation_world,
                               const SpatialVec& v, const SpatialVec& vr,
                               const SpatialVec& dvr, const Mat6& k_a) {
  return body.mass_matrix() * dvr + coriolis_matrix(body, v.tail<3>()) * vr +
         gravity_wrench(body, frame_orientation_world) + k_a * (vr - v);
}

}  // namespace vdc
