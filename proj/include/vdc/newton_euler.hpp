#pragma once

#include <optional>
#include <vector>

#include "vdc/chain_kinematics.hpp"

namespace vdc {

/// Wrenches through one prismatic stage during a backward pass, each in
/// its own frame.
struct PrismaticWrenches {
  SpatialVec f_star_p2 = SpatialVec::Zero();
  SpatialVec f_star_b5 = SpatialVec::Zero();
  SpatialVec f_star_p3 = SpatialVec::Zero();
  SpatialVec f_p3 = SpatialVec::Zero();
  SpatialVec f_b5 = SpatialVec::Zero();
  SpatialVec f_p2 = SpatialVec::Zero();
  double f_ct = 0.0;  // linear actuator force of the prismatic stage
};

/// Wrenches through one revolute segment during a backward pass.
struct StructureWrenches {
  SpatialVec f_star_b0 = SpatialVec::Zero();
  SpatialVec f_star_b1 = SpatialVec::Zero();
  SpatialVec f_star_b3 = SpatialVec::Zero();
  SpatialVec f_star_b4 = SpatialVec::Zero();
  SpatialVec f_e1 = SpatialVec::Zero();  // wrench entering at the revolute tip
  SpatialVec f_bc = SpatialVec::Zero();  // driven-point wrench (closed form)
  double f_c = 0.0;                      // loop actuator force
  std::optional<PrismaticWrenches> pris;
};

struct BackwardResult {
  std::vector<StructureWrenches> structures;
};

/// Full tip-to-base backward dynamics pass. tool_wrench is the wrench the
/// tool applies to the environment, expressed in the tool frame. When
/// `required` is set, the required velocities/accelerations of the trace
/// are used with per-structure velocity-error gain matrices `gains`
/// (nullptr means zero gains).
BackwardResult backward_pass(const ManipulatorModel& model, const KinematicTrace& trace,
                             const SpatialVec& tool_wrench, bool required = false,
                             const std::vector<Mat6>* gains = nullptr);

/// Closed-form loop actuator force from the four net wrenches and the tip
/// wrench, without solving for internal pin forces.
double revolute_actuator_force(const StructureTrace& st, const RevoluteSegmentGeom& geom,
                               const StructureWrenches& w);

/// Closed-form driven-point wrench, independent of internal pin forces.
SpatialVec revolute_driven_wrench(const StructureTrace& st, const StructureWrenches& w);

/// Brute-force alternative: solves the 2x2 linear system for the pin force
/// at P_1j from the two zero-moment conditions, then runs the stepwise
/// wrench recursion. Throws SingularSystem when the system degenerates.
struct OracleResult {
  Vec3 pin_force = Vec3::Zero();  // (fx, fy, 0) at P_1j, in P_1j coordinates
  SpatialVec f_b1 = SpatialVec::Zero();
  SpatialVec f_b0 = SpatialVec::Zero();
  SpatialVec f_b4 = SpatialVec::Zero();
  SpatialVec f_b3 = SpatialVec::Zero();
  SpatialVec f_b2 = SpatialVec::Zero();
  SpatialVec f_bc = SpatialVec::Zero();
  double f_c = 0.0;
};
OracleResult oracle_internal_forces(const StructureTrace& st, const RevoluteSegmentGeom& geom,
                                    const StructureWrenches& w);

/// Generalized force conjugate to the joint angle: tau_j = f_cj dx_j/dq_j.
double joint_torque_from_piston(const RevoluteSegmentGeom& geom, const ClosureState& pos,
                                double f_c);

/// Forward dynamics over the actuated coordinates (q_j and, when present,
/// x_tj): joint accelerations produced by the given piston forces, via the
/// unit-acceleration construction of the mass matrix. Forces enter as the
/// net mechanical piston forces (pressure force minus friction).
struct PistonForces {
  double f_c = 0.0;   // N, loop actuator
  double f_ct = 0.0;  // N, prismatic actuator (ignored without one)
};
std::vector<JointAccel> forward_dynamics(const ManipulatorModel& model,
                                         const std::vector<JointState>& joints,
                                         const std::vector<PistonForces>& forces,
                                         const SpatialVec& tool_wrench = SpatialVec::Zero());

}  // namespace vdc
