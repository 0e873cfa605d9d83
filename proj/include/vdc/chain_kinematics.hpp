#pragma once

#include <optional>
#include <vector>

#include "vdc/hydraulics.hpp"
#include "vdc/segment_geometry.hpp"
#include "vdc/spatial.hpp"

namespace vdc {

/// One serial prismatic segment mounted on the tip link of a revolute
/// segment: cylinder case fixed at P_2j, piston head at B_5j sliding
/// along the local x axis, payload side at P_3j.
struct PrismaticSegment {
  WrenchTransform attach;        // T_cj -> P_2j (on the same link)
  double base_len = 0.0;         // m, P_2j to B_5j at zero extension
  WrenchTransform load_attach;   // B_5j -> P_3j (on the same body)
  double stroke = 0.0;           // m, admissible extension interval (0, stroke)

  BodyParams body_case;          // cylinder case, frame P_2j (added to the tip link)
  BodyParams body_piston;        // piston plus everything rigid with it, frame B_5j
  BodyParams body_load;          // payload side, frame P_3j (may be massless)

  HydraulicActuatorParams actuator;
  FrictionParams friction;

  void validate() const;
};

/// One closed-loop revolute segment: bodies, geometry, actuator.
struct Structure {
  RevoluteSegmentGeom geom;

  BodyParams body_base_link;    // link L_j, frame B_0j
  BodyParams body_distal_link;  // link L_j1, frame B_1j
  BodyParams body_cyl_case;     // cylinder side of the loop actuator, frame B_3j
  BodyParams body_piston;       // piston side, frame B_4j

  HydraulicActuatorParams actuator;
  FrictionParams friction;

  std::optional<PrismaticSegment> prismatic;
};

struct ManipulatorModel {
  std::vector<Structure> structures;
  /// Tip of the final segment -> tool frame.
  WrenchTransform ee_attach;
  /// True when the tool frame follows the last prismatic piston (D_2n
  /// style); false when it sits on the last revolute tip link (D_1n).
  bool ee_after_prismatic = false;

  void validate() const;  // throws InvalidTopology / ModelError
};

/// Which frame each segment tip wrench is resolved against.
enum class TipTarget { NextStructure, OwnPrismatic, EndEffector };

struct FrameResolution {
  struct Entry {
    TipTarget revolute_tip;                 // target of E_1j
    std::optional<TipTarget> prismatic_tip; // target of E_2j when present
  };
  std::vector<Entry> entries;
};

/// Decides, per segment, what the revolute tip (and the prismatic tip,
/// when present) connects to. Throws InvalidTopology when the model's
/// end-effector flag contradicts the segment list.
FrameResolution resolve_frames(const ManipulatorModel& model);

/// Mechanism coordinates of one structure.
struct JointState {
  double q = 0.0;    // rad
  double dq = 0.0;   // rad/s
  double xt = 0.0;   // m, prismatic extension (ignored without a prismatic)
  double dxt = 0.0;  // m/s
};

struct JointAccel {
  double ddq = 0.0;
  double ddxt = 0.0;
};

struct FramePose {
  Mat3 rotation = Mat3::Identity();  // frame axes in world coordinates
  Vec3 origin = Vec3::Zero();        // m, world

  FramePose compose(const WrenchTransform& u) const {
    return {rotation * u.rotation, origin + rotation * u.offset};
  }
};

/// Velocity and acceleration of one frame, measured and required, all in
/// that frame's own coordinates.
struct FrameMotion {
  SpatialVec v = SpatialVec::Zero();
  SpatialVec a = SpatialVec::Zero();
  SpatialVec v_r = SpatialVec::Zero();
  SpatialVec a_r = SpatialVec::Zero();
};

struct PrismaticTrace {
  double xt = 0.0, dxt = 0.0;  // measured extension state
  FramePose pose_p2, pose_b5, pose_p3, pose_e2;
  FrameMotion p2, b5, p3, e2;
  WrenchTransform u_p2_b5;  // extension-dependent
  WrenchTransform u_b5_p3;
  WrenchTransform u_p3_e2;  // next base attach or ee attach
};

struct StructureTrace {
  ClosureState closure;       // measured coordinates and rates
  ClosureRates rates_r;       // required rates of (x, q1, q2)
  ClosureAccels accels;       // measured accelerations (when propagated)
  ClosureAccels accels_r;     // required accelerations
  double ddq = 0.0;           // measured joint acceleration input
  double dq_r = 0.0, ddq_r = 0.0;

  FramePose pose_bc, pose_b1, pose_b3, pose_b4, pose_tc, pose_e1;
  FrameMotion bc, b1, b3, b4, tc, e1;

  // Loop transforms at the current configuration.
  WrenchTransform u_b0_b1;  // rot_z(q), offset (L_j, 0, 0)
  WrenchTransform u_b1_t1;  // offset (L_j1, 0, 0)
  WrenchTransform u_b2_b3;  // rot_z(q1)
  WrenchTransform u_b3_b4;  // offset (x + x0 - l_c, 0, 0)
  WrenchTransform u_b4_t2;  // rot_z(q2), offset (l_c, 0, 0)
  WrenchTransform u_b4_p1;  // offset (l_c, 0, 0)
  WrenchTransform u_b1_p1;  // rot_z(-q2), offset (L_j1, 0, 0)
  WrenchTransform u_tc_e1;  // next base attach, prismatic attach or ee attach

  std::optional<PrismaticTrace> pris;
};

struct KinematicTrace {
  FrameResolution resolution;
  std::vector<StructureTrace> structures;
  FramePose tool_pose;
  FrameMotion tool;
};

/// Poses, loop transforms and measured frame velocities of every segment,
/// starting from a world-fixed base (optionally moving with base_motion,
/// expressed at the mount frame the first base_attach hangs from).
KinematicTrace forward_kinematics(const ManipulatorModel& model,
                                  const std::vector<JointState>& joints,
                                  const SpatialVec& base_velocity = SpatialVec::Zero());

/// Adds measured accelerations to an existing trace.
void propagate_accelerations(const ManipulatorModel& model, KinematicTrace& trace,
                             const std::vector<JointAccel>& accels,
                             const SpatialVec& base_accel = SpatialVec::Zero());

/// Fills the required velocity and acceleration fields. Required rates of
/// the closure coordinates follow from the required joint rates through
/// the same closure maps; transform time-derivatives are evaluated at the
/// required rates.
void propagate_required(const ManipulatorModel& model, KinematicTrace& trace,
                        const std::vector<JointState>& joints_required,
                        const std::vector<JointAccel>& accels_required,
                        const SpatialVec& base_velocity = SpatialVec::Zero(),
                        const SpatialVec& base_accel = SpatialVec::Zero());

/// Piston-space view of the joint command: required piston velocity
/// dx_r = (dx/dq) dq_r for the revolute loop.
double required_piston_rate(const RevoluteSegmentGeom& geom, const ClosureState& pos,
                            double dq_r);

}  // namespace vdc
