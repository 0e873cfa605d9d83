#include "vdc/newton_euler.hpp"

#include <cmath>

namespace vdc {

namespace {

constexpr double kSinGuard = 1e-8;

SpatialVec body_wrench(const BodyParams& body, const Mat3& orientation, const FrameMotion& m,
                       bool required, const Mat6& k) {
  return required ? required_net_wrench(body, orientation, m.v, m.v_r, m.a_r, k)
                  : net_wrench(body, orientation, m.v, m.a);
}

}  // namespace

double revolute_actuator_force(const StructureTrace& st, const RevoluteSegmentGeom& geom,
                               const StructureWrenches& w) {
  const double s2 = std::sin(st.closure.q2);
  const double c2 = std::cos(st.closure.q2);
  if (std::abs(s2) < kSinGuard) throw ClosureSingularity("piston joint angle singular");
  const double r = st.closure.x + geom.cyl_base_len;
  const WrenchTransform u_b1_e1 = st.u_b1_t1 * st.u_tc_e1;

  const SpatialVec tip_moment_src = w.f_star_b1 + transform_wrench(u_b1_e1, w.f_e1);
  const double term1 = x_f().dot(w.f_star_b4);
  const double term2 = z_tau().dot(tip_moment_src) / (geom.link_distal * s2);
  const double term3 = (z_tau().dot(w.f_star_b3) + z_tau().dot(w.f_star_b4) +
                        y_f().dot(w.f_star_b4) * (r - geom.piston_len)) /
                       (r * (s2 / c2));
  return term1 - term2 - term3;
}

SpatialVec revolute_driven_wrench(const StructureTrace& st, const StructureWrenches& w) {
  const WrenchTransform u_b1_e1 = st.u_b1_t1 * st.u_tc_e1;
  return w.f_star_b0 + transform_wrench(st.u_b0_b1, w.f_star_b1) +
         transform_wrench(st.u_b2_b3, w.f_star_b3) +
         transform_wrench(st.u_b2_b3 * st.u_b3_b4, w.f_star_b4) +
         transform_wrench(st.u_b0_b1 * u_b1_e1, w.f_e1);
}

OracleResult oracle_internal_forces(const StructureTrace& st, const RevoluteSegmentGeom& geom,
                                    const StructureWrenches& w) {
  const double s2 = std::sin(st.closure.q2);
  const double c2 = std::cos(st.closure.q2);
  if (std::abs(s2) < kSinGuard) throw SingularSystem("pin-force system singular");
  const double r = st.closure.x + geom.cyl_base_len;
  const double l1 = geom.link_distal;
  const WrenchTransform u_b1_e1 = st.u_b1_t1 * st.u_tc_e1;

  // Unknown planar pin force (fx, fy) at P_1j from the two zero-moment
  // conditions of the distal link and the cylinder chain.
  const double rhs1 = z_tau().dot(w.f_star_b1 + transform_wrench(u_b1_e1, w.f_e1));
  const double rhs2 = -(z_tau().dot(w.f_star_b3) + z_tau().dot(w.f_star_b4) +
                        (r - geom.piston_len) * y_f().dot(w.f_star_b4));
  OracleResult out;
  const double fy = rhs2 / r;
  const double fx = (fy * l1 * c2 - rhs1) / (l1 * s2);
  out.pin_force = {fx, fy, 0.0};

  SpatialVec pin = SpatialVec::Zero();
  pin.head<3>() = out.pin_force;

  out.f_b1 = w.f_star_b1 + transform_wrench(u_b1_e1, w.f_e1) - transform_wrench(st.u_b1_p1, pin);
  out.f_b0 = w.f_star_b0 + transform_wrench(st.u_b0_b1, out.f_b1);
  out.f_b4 = w.f_star_b4 + transform_wrench(st.u_b4_p1, pin);
  out.f_b3 = w.f_star_b3 + transform_wrench(st.u_b3_b4, out.f_b4);
  out.f_b2 = transform_wrench(st.u_b2_b3, out.f_b3);
  out.f_bc = out.f_b0 + out.f_b2;
  out.f_c = x_f().dot(out.f_b4);
  return out;
}

BackwardResult backward_pass(const ManipulatorModel& model, const KinematicTrace& trace,
                             const SpatialVec& tool_wrench, bool required,
                             const std::vector<Mat6>* gains) {
  const size_t n = model.structures.size();
  BackwardResult res;
  res.structures.resize(n);
  SpatialVec incoming = tool_wrench;  // wrench in the frame following segment j
  for (size_t jj = n; jj-- > 0;) {
    const Structure& s = model.structures[jj];
    const StructureTrace& st = trace.structures[jj];
    StructureWrenches& w = res.structures[jj];
    const Mat6 k = gains ? (*gains)[jj] : Mat6::Zero();

    w.f_star_b0 = body_wrench(s.body_base_link, st.pose_bc.rotation, st.bc, required, k);
    w.f_star_b1 = body_wrench(s.body_distal_link, st.pose_b1.rotation, st.b1, required, k);
    w.f_star_b3 = body_wrench(s.body_cyl_case, st.pose_b3.rotation, st.b3, required, k);
    w.f_star_b4 = body_wrench(s.body_piston, st.pose_b4.rotation, st.b4, required, k);

    if (st.pris) {
      const PrismaticSegment& p = *s.prismatic;
      const PrismaticTrace& pt = *st.pris;
      w.pris.emplace();
      PrismaticWrenches& pw = *w.pris;
      pw.f_star_p2 = body_wrench(p.body_case, pt.pose_p2.rotation, pt.p2, required, k);
      pw.f_star_b5 = body_wrench(p.body_piston, pt.pose_b5.rotation, pt.b5, required, k);
      pw.f_star_p3 = body_wrench(p.body_load, pt.pose_p3.rotation, pt.p3, required, k);
      pw.f_p3 = pw.f_star_p3 + transform_wrench(pt.u_p3_e2, incoming);
      pw.f_b5 = pw.f_star_b5 + transform_wrench(pt.u_b5_p3, pw.f_p3);
      pw.f_ct = x_f().dot(pw.f_b5);
      pw.f_p2 = pw.f_star_p2 + transform_wrench(pt.u_p2_b5, pw.f_b5);
      w.f_e1 = pw.f_p2;
    } else {
      w.f_e1 = incoming;
    }

    w.f_c = revolute_actuator_force(st, s.geom, w);
    w.f_bc = revolute_driven_wrench(st, w);
    incoming = w.f_bc;
  }
  return res;
}

double joint_torque_from_piston(const RevoluteSegmentGeom& geom, const ClosureState& pos,
                                double f_c) {
  const double r = pos.x + geom.cyl_base_len;
  return f_c * (-geom.link_base * geom.link_distal * std::sin(pos.q) / r);
}

std::vector<JointAccel> forward_dynamics(const ManipulatorModel& model,
                                         const std::vector<JointState>& joints,
                                         const std::vector<PistonForces>& forces,
                                         const SpatialVec& tool_wrench) {
  const size_t n = model.structures.size();
  if (forces.size() != n) throw ModelError("forward_dynamics: one force pair per segment");

  // Map structure index -> generalized coordinate slots.
  std::vector<int> q_slot(n), xt_slot(n, -1);
  int m = 0;
  for (size_t j = 0; j < n; ++j) {
    q_slot[j] = m++;
    if (model.structures[j].prismatic) xt_slot[j] = m++;
  }

  // Inverse dynamics: generalized forces balancing the given accelerations.
  auto inverse_dyn = [&](const ManipulatorModel& mdl, const std::vector<JointState>& js,
                         const std::vector<JointAccel>& acc,
                         const SpatialVec& tip) -> Eigen::VectorXd {
    KinematicTrace tr = forward_kinematics(mdl, js);
    propagate_accelerations(mdl, tr, acc);
    const BackwardResult bw = backward_pass(mdl, tr, tip);
    Eigen::VectorXd tau(m);
    for (size_t j = 0; j < n; ++j) {
      tau(q_slot[j]) = joint_torque_from_piston(mdl.structures[j].geom,
                                                tr.structures[j].closure,
                                                bw.structures[j].f_c);
      if (xt_slot[j] >= 0) tau(xt_slot[j]) = bw.structures[j].pris->f_ct;
    }
    return tau;
  };

  // Bias pass: actual rates, zero acceleration, gravity and tip load on.
  const std::vector<JointAccel> zero_acc(n);
  const Eigen::VectorXd bias = inverse_dyn(model, joints, zero_acc, tool_wrench);

  // Mass-matrix columns: unit accelerations with zero rates, no gravity,
  // no tip load.
  ManipulatorModel weightless = model;
  for (Structure& s : weightless.structures) {
    s.body_base_link.gravity_world.setZero();
    s.body_distal_link.gravity_world.setZero();
    s.body_cyl_case.gravity_world.setZero();
    s.body_piston.gravity_world.setZero();
    if (s.prismatic) {
      s.prismatic->body_case.gravity_world.setZero();
      s.prismatic->body_piston.gravity_world.setZero();
      s.prismatic->body_load.gravity_world.setZero();
    }
  }
  std::vector<JointState> at_rest = joints;
  for (JointState& js : at_rest) js.dq = js.dxt = 0.0;

  Eigen::MatrixXd mass(m, m);
  for (int k = 0; k < m; ++k) {
    std::vector<JointAccel> acc(n);
    for (size_t j = 0; j < n; ++j) {
      if (q_slot[j] == k) acc[j].ddq = 1.0;
      if (xt_slot[j] == k) acc[j].ddxt = 1.0;
    }
    mass.col(k) = inverse_dyn(weightless, at_rest, acc, SpatialVec::Zero());
  }
  mass = 0.5 * (mass + mass.transpose()).eval();

  Eigen::VectorXd applied(m);
  const KinematicTrace pose_trace = forward_kinematics(model, joints);
  for (size_t j = 0; j < n; ++j) {
    applied(q_slot[j]) = joint_torque_from_piston(model.structures[j].geom,
                                                  pose_trace.structures[j].closure,
                                                  forces[j].f_c);
    if (xt_slot[j] >= 0) applied(xt_slot[j]) = forces[j].f_ct;
  }

  Eigen::LLT<Eigen::MatrixXd> llt(mass);
  if (llt.info() != Eigen::Success)
    throw SingularMassMatrix("generalized mass matrix is not positive definite");
  const Eigen::VectorXd ddy = llt.solve(applied - bias);

  std::vector<JointAccel> out(n);
  for (size_t j = 0; j < n; ++j) {
    out[j].ddq = ddy(q_slot[j]);
    if (xt_slot[j] >= 0) out[j].ddxt = ddy(xt_slot[j]);
  }
  return out;
}

}  // namespace vdc
