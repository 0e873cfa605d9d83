#include "vdc/chain_kinematics.hpp"

#include <cmath>
#include <sstream>

namespace vdc {

void PrismaticSegment::validate() const {
  if (base_len <= 0.0 || stroke <= 0.0)
    throw ModelError("prismatic segment lengths must be positive");
  if (!attach.well_formed() || !load_attach.well_formed())
    throw ModelError("prismatic attachment transform is not a rotation");
  if (!body_case.well_formed() || !body_piston.well_formed() || !body_load.well_formed())
    throw ModelError("prismatic body parameters are not physical");
  actuator.validate();
  friction.validate();
}

void ManipulatorModel::validate() const {
  if (structures.empty()) throw InvalidTopology("model has no segments");
  for (const Structure& s : structures) {
    s.geom.validate();
    if (!s.geom.base_attach.well_formed())
      throw ModelError("segment attachment transform is not a rotation");
    if (!s.body_base_link.well_formed() || !s.body_distal_link.well_formed() ||
        !s.body_cyl_case.well_formed() || !s.body_piston.well_formed())
      throw ModelError("segment body parameters are not physical");
    s.actuator.validate();
    s.friction.validate();
    if (s.prismatic) s.prismatic->validate();
  }
  if (!ee_attach.well_formed()) throw ModelError("end-effector transform is not a rotation");
  resolve_frames(*this);  // throws InvalidTopology on contradiction
}

FrameResolution resolve_frames(const ManipulatorModel& model) {
  FrameResolution res;
  const size_t n = model.structures.size();
  if (n == 0) throw InvalidTopology("model has no segments");
  res.entries.resize(n);
  for (size_t j = 0; j < n; ++j) {
    const bool last = (j + 1 == n);
    const bool has_pris = model.structures[j].prismatic.has_value();
    FrameResolution::Entry& e = res.entries[j];
    if (has_pris) {
      e.revolute_tip = TipTarget::OwnPrismatic;
      e.prismatic_tip = last ? TipTarget::EndEffector : TipTarget::NextStructure;
      if (last && !model.ee_after_prismatic)
        throw InvalidTopology("last segment drives a prismatic stage but the tool frame "
                              "is declared to sit on the revolute tip link");
    } else {
      e.revolute_tip = last ? TipTarget::EndEffector : TipTarget::NextStructure;
      if (last && model.ee_after_prismatic)
        throw InvalidTopology("tool frame declared after a prismatic stage but the last "
                              "segment has none");
    }
  }
  return res;
}

double required_piston_rate(const RevoluteSegmentGeom& geom, const ClosureState& pos,
                            double dq_r) {
  return closure_rates(geom, pos, dq_r).dx;
}

namespace {

struct Motion {
  SpatialVec v = SpatialVec::Zero();
  SpatialVec a = SpatialVec::Zero();
};

// Child motion across a z-revolute joint: V_B = z dq + U^T V_A, with the
// transform derivative term dU^T/dt V_A expanded at the given joint rate.
Motion rev_step(const WrenchTransform& u, double dq, double ddq, const Motion& parent) {
  const Vec3 zhat = Vec3::UnitZ();
  const Vec3 v = parent.v.head<3>();
  const Vec3 w = parent.v.tail<3>();
  Motion out;
  out.v = transform_velocity(u, parent.v) + z_tau() * dq;
  out.a = transform_velocity(u, parent.a) + z_tau() * ddq;
  out.a.head<3>() -= dq * (u.rotation.transpose() * zhat.cross(v + w.cross(u.offset)));
  out.a.tail<3>() -= dq * (u.rotation.transpose() * zhat.cross(w));
  return out;
}

// Child motion across an x-prismatic joint whose offset slides along the
// parent x axis at rate dx.
Motion pris_step(const WrenchTransform& u, double dx, double ddx, const Motion& parent) {
  const Vec3 dr(dx, 0.0, 0.0);
  Motion out;
  out.v = transform_velocity(u, parent.v) + x_f() * dx;
  out.a = transform_velocity(u, parent.a) + x_f() * ddx;
  out.a.head<3>() += u.rotation.transpose() * parent.v.tail<3>().cross(dr);
  return out;
}

Motion fixed_step(const WrenchTransform& u, const Motion& parent) {
  return {transform_velocity(u, parent.v), transform_velocity(u, parent.a)};
}

struct StructureRates {
  double dq = 0.0, ddq = 0.0;
  double dx = 0.0, ddx = 0.0;
  double dq1 = 0.0, ddq1 = 0.0;
  double dq2 = 0.0, ddq2 = 0.0;
  double dxt = 0.0, ddxt = 0.0;
};

// Runs the velocity/acceleration recursion through one structure and
// stores the results in the chosen (measured or required) slot.
Motion propagate_structure(StructureTrace& st, const StructureRates& r, const Motion& base,
                           bool required_slot) {
  auto store = [&](FrameMotion& fm, const Motion& m) {
    if (required_slot) {
      fm.v_r = m.v;
      fm.a_r = m.a;
    } else {
      fm.v = m.v;
      fm.a = m.a;
    }
  };

  store(st.bc, base);
  const Motion b1 = rev_step(st.u_b0_b1, r.dq, r.ddq, base);
  store(st.b1, b1);
  const Motion tc = fixed_step(st.u_b1_t1, b1);
  store(st.tc, tc);
  const Motion b3 = rev_step(st.u_b2_b3, r.dq1, r.ddq1, base);
  store(st.b3, b3);
  const Motion b4 = pris_step(st.u_b3_b4, r.dx, r.ddx, b3);
  store(st.b4, b4);
  const Motion e1 = fixed_step(st.u_tc_e1, tc);
  store(st.e1, e1);
  if (!st.pris) return e1;

  PrismaticTrace& pt = *st.pris;
  store(pt.p2, e1);
  const Motion b5 = pris_step(pt.u_p2_b5, r.dxt, r.ddxt, e1);
  store(pt.b5, b5);
  const Motion p3 = fixed_step(pt.u_b5_p3, b5);
  store(pt.p3, p3);
  const Motion e2 = fixed_step(pt.u_p3_e2, p3);
  store(pt.e2, e2);
  return e2;
}

void check_joint_count(const ManipulatorModel& model, size_t n, const char* what) {
  if (n != model.structures.size()) {
    std::ostringstream msg;
    msg << what << ": got " << n << " entries for " << model.structures.size() << " segments";
    throw ModelError(msg.str());
  }
}

}  // namespace

KinematicTrace forward_kinematics(const ManipulatorModel& model,
                                  const std::vector<JointState>& joints,
                                  const SpatialVec& base_velocity) {
  check_joint_count(model, joints.size(), "forward_kinematics joint state");
  KinematicTrace trace;
  trace.resolution = resolve_frames(model);
  trace.structures.resize(model.structures.size());

  FramePose parent_pose;  // world
  Motion parent{base_velocity, SpatialVec::Zero()};
  for (size_t j = 0; j < model.structures.size(); ++j) {
    const Structure& s = model.structures[j];
    StructureTrace& st = trace.structures[j];
    st.closure = closure_from_angle(s.geom, joints[j].q, joints[j].dq);

    st.u_b0_b1 = WrenchTransform::rot_z(st.closure.q, {s.geom.link_base, 0.0, 0.0});
    st.u_b1_t1 = WrenchTransform::translation({s.geom.link_distal, 0.0, 0.0});
    st.u_b2_b3 = WrenchTransform::rot_z(st.closure.q1);
    st.u_b3_b4 = WrenchTransform::translation(
        {st.closure.x + s.geom.cyl_base_len - s.geom.piston_len, 0.0, 0.0});
    st.u_b4_t2 = WrenchTransform::rot_z(st.closure.q2, {s.geom.piston_len, 0.0, 0.0});
    st.u_b4_p1 = WrenchTransform::translation({s.geom.piston_len, 0.0, 0.0});
    st.u_b1_p1 = WrenchTransform::rot_z(-st.closure.q2, {s.geom.link_distal, 0.0, 0.0});

    const TipTarget tip = trace.resolution.entries[j].revolute_tip;
    if (tip == TipTarget::OwnPrismatic)
      st.u_tc_e1 = s.prismatic->attach;
    else if (tip == TipTarget::NextStructure)
      st.u_tc_e1 = model.structures[j + 1].geom.base_attach;
    else
      st.u_tc_e1 = model.ee_attach;

    st.pose_bc = parent_pose.compose(s.geom.base_attach);
    st.pose_b1 = st.pose_bc.compose(st.u_b0_b1);
    st.pose_b3 = st.pose_bc.compose(st.u_b2_b3);
    st.pose_b4 = st.pose_b3.compose(st.u_b3_b4);
    st.pose_tc = st.pose_b1.compose(st.u_b1_t1);
    st.pose_e1 = st.pose_tc.compose(st.u_tc_e1);

    StructureRates rates;
    rates.dq = st.closure.dq;
    rates.dx = st.closure.dx;
    rates.dq1 = st.closure.dq1;
    rates.dq2 = st.closure.dq2;

    if (s.prismatic) {
      const PrismaticSegment& p = *s.prismatic;
      if (joints[j].xt <= 0.0 || joints[j].xt >= p.stroke)
        throw StrokeLimit("prismatic extension outside admissible interval");
      st.pris.emplace();
      PrismaticTrace& pt = *st.pris;
      pt.xt = joints[j].xt;
      pt.dxt = joints[j].dxt;
      pt.u_p2_b5 = WrenchTransform::translation({p.base_len + joints[j].xt, 0.0, 0.0});
      pt.u_b5_p3 = p.load_attach;
      pt.u_p3_e2 = (trace.resolution.entries[j].prismatic_tip == TipTarget::NextStructure)
                       ? model.structures[j + 1].geom.base_attach
                       : model.ee_attach;
      pt.pose_p2 = st.pose_e1;
      pt.pose_b5 = pt.pose_p2.compose(pt.u_p2_b5);
      pt.pose_p3 = pt.pose_b5.compose(pt.u_b5_p3);
      pt.pose_e2 = pt.pose_p3.compose(pt.u_p3_e2);
      rates.dxt = joints[j].dxt;
    }

    parent = propagate_structure(st, rates, parent, /*required_slot=*/false);
    parent_pose = s.prismatic ? st.pris->pose_p3 : st.pose_tc;
  }

  const StructureTrace& last = trace.structures.back();
  trace.tool_pose = last.pris ? last.pris->pose_e2 : last.pose_e1;
  trace.tool.v = last.pris ? last.pris->e2.v : last.e1.v;
  return trace;
}

void propagate_accelerations(const ManipulatorModel& model, KinematicTrace& trace,
                             const std::vector<JointAccel>& accels,
                             const SpatialVec& base_accel) {
  check_joint_count(model, accels.size(), "propagate_accelerations input");
  Motion parent;
  parent.v = trace.structures.front().bc.v;  // restored below from stored slots
  parent.a = base_accel;
  // Re-run the measured recursion with the stored rates plus the given
  // joint accelerations.
  for (size_t j = 0; j < model.structures.size(); ++j) {
    const Structure& s = model.structures[j];
    StructureTrace& st = trace.structures[j];
    // bc velocity was produced by the previous structure (or the base);
    // reuse it so the recursion stays consistent.
    parent.v = st.bc.v;

    st.ddq = accels[j].ddq;
    st.accels = closure_accels(s.geom, st.closure, accels[j].ddq);

    StructureRates rates;
    rates.dq = st.closure.dq;
    rates.ddq = accels[j].ddq;
    rates.dx = st.closure.dx;
    rates.ddx = st.accels.ddx;
    rates.dq1 = st.closure.dq1;
    rates.ddq1 = st.accels.ddq1;
    rates.dq2 = st.closure.dq2;
    rates.ddq2 = st.accels.ddq2;
    if (st.pris) {
      rates.dxt = st.pris->dxt;
      rates.ddxt = accels[j].ddxt;
    }
    parent = propagate_structure(st, rates, parent, /*required_slot=*/false);
  }
  const StructureTrace& last = trace.structures.back();
  trace.tool.v = last.pris ? last.pris->e2.v : last.e1.v;
  trace.tool.a = last.pris ? last.pris->e2.a : last.e1.a;
}

void propagate_required(const ManipulatorModel& model, KinematicTrace& trace,
                        const std::vector<JointState>& joints_required,
                        const std::vector<JointAccel>& accels_required,
                        const SpatialVec& base_velocity, const SpatialVec& base_accel) {
  check_joint_count(model, joints_required.size(), "propagate_required joint state");
  check_joint_count(model, accels_required.size(), "propagate_required accelerations");
  Motion parent{base_velocity, base_accel};
  for (size_t j = 0; j < model.structures.size(); ++j) {
    const Structure& s = model.structures[j];
    StructureTrace& st = trace.structures[j];

    st.dq_r = joints_required[j].dq;
    st.ddq_r = accels_required[j].ddq;
    st.rates_r = closure_rates(s.geom, st.closure, st.dq_r);
    ClosureState at_required = st.closure;
    at_required.dq = st.dq_r;
    at_required.dx = st.rates_r.dx;
    at_required.dq1 = st.rates_r.dq1;
    at_required.dq2 = st.rates_r.dq2;
    st.accels_r = closure_accels(s.geom, at_required, st.ddq_r);

    StructureRates rates;
    rates.dq = st.dq_r;
    rates.ddq = st.ddq_r;
    rates.dx = st.rates_r.dx;
    rates.ddx = st.accels_r.ddx;
    rates.dq1 = st.rates_r.dq1;
    rates.ddq1 = st.accels_r.ddq1;
    rates.dq2 = st.rates_r.dq2;
    rates.ddq2 = st.accels_r.ddq2;
    if (st.pris) {
      rates.dxt = joints_required[j].dxt;
      rates.ddxt = accels_required[j].ddxt;
    }
    parent = propagate_structure(st, rates, parent, /*required_slot=*/true);
  }
  const StructureTrace& last = trace.structures.back();
  trace.tool.v_r = last.pris ? last.pris->e2.v_r : last.e1.v_r;
  trace.tool.a_r = last.pris ? last.pris->e2.a_r : last.e1.a_r;
}

}  // namespace vdc
