#pragma once

#include <Eigen/Dense>

namespace vdc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// 6D spatial vector, linear block first, angular block second.
/// Used both for linear/angular velocities and for force/moment pairs.
using SpatialVec = Vec6;

inline Eigen::VectorBlock<SpatialVec, 3> linear_part(SpatialVec& v) { return v.head<3>(); }
inline Eigen::VectorBlock<SpatialVec, 3> angular_part(SpatialVec& v) { return v.tail<3>(); }

// Selector vectors: z_tau picks the angular z component (revolute joint axis),
// x_f and y_f pick the linear x and y components.
inline SpatialVec z_tau() { return (SpatialVec() << 0, 0, 0, 0, 0, 1).finished(); }
inline SpatialVec x_f() { return (SpatialVec() << 1, 0, 0, 0, 0, 0).finished(); }
inline SpatialVec y_f() { return (SpatialVec() << 0, 1, 0, 0, 0, 0).finished(); }

Mat3 skew(const Vec3& r);

/// Force/moment transformation between two frames fixed to the same body.
/// rotation is the direction-cosine matrix of the child frame expressed in
/// the parent frame; offset is the child origin in parent coordinates.
struct WrenchTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 offset = Vec3::Zero();

  static WrenchTransform identity() { return {}; }
  static WrenchTransform rot_z(double angle, const Vec3& offset = Vec3::Zero());
  static WrenchTransform translation(const Vec3& offset) { return {Mat3::Identity(), offset}; }

  Mat6 as_matrix() const;
  bool well_formed(double tol = 1e-12) const;

  /// Composition: parent->child followed by child->grandchild.
  WrenchTransform operator*(const WrenchTransform& other) const;
};

/// Child-frame velocity from parent-frame velocity (U^T * v).
SpatialVec transform_velocity(const WrenchTransform& u, const SpatialVec& v_parent);

/// Parent-frame wrench from child-frame wrench (U * f).
SpatialVec transform_wrench(const WrenchTransform& u, const SpatialVec& f_child);

/// Inertial parameters of one rigid body, expressed in its body frame.
/// The inertia tensor is taken about the frame origin, not the mass center.
struct BodyParams {
  double mass = 0.0;                      // kg
  Vec3 com_offset = Vec3::Zero();         // m, frame origin to mass center
  Mat3 inertia = Mat3::Zero();            // kg m^2, about frame origin
  Vec3 gravity_world = {0.0, 0.0, -9.81}; // m/s^2

  /// Spatial mass matrix M_A (6x6) for the linear-then-angular ordering.
  Mat6 mass_matrix() const;
  bool well_formed(double tol = 1e-12) const;
};

/// Net wrench F* = M_A dV/dt + C_A(w) V + G_A of one rigid body.
/// frame_orientation_world rotates body-frame coordinates into world.
SpatialVec net_wrench(const BodyParams& body, const Mat3& frame_orientation_world,
                      const SpatialVec& v, const SpatialVec& dv);

/// Required net wrench F_r* = M_A dVr/dt + C_A(w) Vr + G_A + K_A (Vr - V).
/// The Coriolis matrix is evaluated at the measured angular velocity.
SpatialVec required_net_wrench(const BodyParams& body, const Mat3& frame_orientation_world,
                               const SpatialVec& v, const SpatialVec& vr,
                               const SpatialVec& dvr, const Mat6& k_a);

}  // namespace vdc
