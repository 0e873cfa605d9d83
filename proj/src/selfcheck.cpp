#include "vdc/selfcheck.hpp"

#include <cmath>
#include <random>

#include "vdc/newton_euler.hpp"

namespace vdc {

namespace {

struct Rand {
  std::mt19937 rng{20240915};
  double operator()(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }
};

SpatialVec rand_spatial(Rand& r, double scale) {
  SpatialVec v;
  for (int i = 0; i < 6; ++i) v(i) = r(-scale, scale);
  return v;
}

BodyParams rand_body(Rand& r, const Vec3& gravity) {
  BodyParams b;
  b.mass = r(0.3, 4.0);
  b.com_offset = {r(-0.2, 0.2), r(-0.2, 0.2), r(-0.2, 0.2)};
  Mat3 a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = r(-1.0, 1.0);
  b.inertia = a * a.transpose() + 0.05 * Mat3::Identity();
  b.inertia += b.mass * (skew(b.com_offset) * skew(b.com_offset).transpose());
  b.gravity_world = gravity;
  return b;
}

RevoluteSegmentGeom rand_geom(Rand& r) {
  RevoluteSegmentGeom g;
  g.link_base = r(0.2, 1.2);
  g.link_distal = r(0.2, 1.2);
  const double lo = std::abs(g.link_base - g.link_distal);
  const double hi = g.link_base + g.link_distal;
  g.cyl_base_len = lo + 0.20 * (hi - lo);
  g.stroke = 0.60 * (hi - lo);
  g.piston_len = 0.6 * g.cyl_base_len;
  g.base_attach = WrenchTransform::rot_z(r(-1.0, 1.0), {r(-0.3, 0.3), r(-0.3, 0.3), 0});
  return g;
}

ManipulatorModel rand_single_structure(Rand& r, const Vec3& gravity) {
  ManipulatorModel m;
  Structure s;
  s.geom = rand_geom(r);
  s.body_base_link = rand_body(r, gravity);
  s.body_distal_link = rand_body(r, gravity);
  s.body_cyl_case = rand_body(r, gravity);
  s.body_piston = rand_body(r, gravity);
  m.structures = {s};
  m.ee_attach = WrenchTransform::rot_z(r(-0.5, 0.5), {r(-0.2, 0.2), 0, 0});
  return m;
}

JointState rand_joint(Rand& r, const RevoluteSegmentGeom& g, double rate_scale) {
  const double rr = g.cyl_base_len + r(0.1, 0.9) * g.stroke;
  JointState js;
  js.q = -std::acos((rr * rr - g.link_base * g.link_base - g.link_distal * g.link_distal) /
                    (2.0 * g.link_base * g.link_distal));
  js.dq = r(-rate_scale, rate_scale);
  return js;
}

void record(CheckResult& c, double err) {
  ++c.trials;
  c.worst = std::max(c.worst, err);
  if (!(err <= c.tolerance)) ++c.failures;
}

CheckResult check_actuator_force_oracle(Rand& r) {
  CheckResult c{"actuator force: closed form vs pin-force oracle", 0, 0, 0.0, 1e-9};
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec3 gravity = {r(-10, 10), r(-10, 10), r(-10, 10)};
    const ManipulatorModel m = rand_single_structure(r, gravity);
    const std::vector<JointState> js = {rand_joint(r, m.structures[0].geom, 2.0)};
    const std::vector<JointAccel> acc = {{r(-3.0, 3.0), 0.0}};
    KinematicTrace tr = forward_kinematics(m, js);
    propagate_accelerations(m, tr, acc);
    const BackwardResult bw = backward_pass(m, tr, rand_spatial(r, 50.0));
    const OracleResult oracle =
        oracle_internal_forces(tr.structures[0], m.structures[0].geom, bw.structures[0]);
    const double scale = std::max(1.0, std::abs(oracle.f_c));
    record(c, std::abs(bw.structures[0].f_c - oracle.f_c) / scale);
  }
  return c;
}

CheckResult check_driven_wrench_oracle(Rand& r) {
  CheckResult c{"driven wrench: closed form vs stepwise recursion", 0, 0, 0.0, 1e-9};
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec3 gravity = {r(-10, 10), r(-10, 10), r(-10, 10)};
    const ManipulatorModel m = rand_single_structure(r, gravity);
    const std::vector<JointState> js = {rand_joint(r, m.structures[0].geom, 2.0)};
    const std::vector<JointAccel> acc = {{r(-3.0, 3.0), 0.0}};
    KinematicTrace tr = forward_kinematics(m, js);
    propagate_accelerations(m, tr, acc);
    const BackwardResult bw = backward_pass(m, tr, rand_spatial(r, 30.0));
    const OracleResult oracle =
        oracle_internal_forces(tr.structures[0], m.structures[0].geom, bw.structures[0]);
    const double scale = std::max(1.0, oracle.f_bc.cwiseAbs().maxCoeff());
    record(c, (bw.structures[0].f_bc - oracle.f_bc).cwiseAbs().maxCoeff() / scale);
  }
  return c;
}

CheckResult check_closure_differentials(Rand& r) {
  CheckResult c{"closure maps: analytic rates vs finite differences", 0, 0, 0.0, 1e-5};
  const double h = 1e-6;
  for (int traj = 0; traj < 100; ++traj) {
    const RevoluteSegmentGeom g = rand_geom(r);
    // Smooth angle trajectory inside the admissible band.
    const double r_mid = g.cyl_base_len + 0.5 * g.stroke;
    const double q0 = -std::acos(
        (r_mid * r_mid - g.link_base * g.link_base - g.link_distal * g.link_distal) /
        (2.0 * g.link_base * g.link_distal));
    const double amp = 0.05, w = r(0.5, 3.0), ph = r(0.0, 6.28);
    auto q_at = [&](double t) { return q0 + amp * std::sin(w * t + ph); };
    auto dq_at = [&](double t) { return amp * w * std::cos(w * t + ph); };
    auto ddq_at = [&](double t) { return -amp * w * w * std::sin(w * t + ph); };

    const double t = r(0.0, 2.0);
    const ClosureState cs = closure_from_angle(g, q_at(t), dq_at(t));
    const ClosureAccels ca = closure_accels(g, cs, ddq_at(t));

    const ClosureState lo = closure_from_angle(g, q_at(t - h), dq_at(t - h));
    const ClosureState hi = closure_from_angle(g, q_at(t + h), dq_at(t + h));
    auto rel = [](double got, double want) {
      return std::abs(got - want) / std::max(1.0, std::abs(want));
    };
    record(c, rel(cs.dx, (hi.x - lo.x) / (2 * h)));
    record(c, rel(cs.dq1, (hi.q1 - lo.q1) / (2 * h)));
    record(c, rel(cs.dq2, (hi.q2 - lo.q2) / (2 * h)));
    record(c, rel(ca.ddx, (hi.dx - lo.dx) / (2 * h)));
    record(c, rel(ca.ddq1, (hi.dq1 - lo.dq1) / (2 * h)));
    record(c, rel(ca.ddq2, (hi.dq2 - lo.dq2) / (2 * h)));
  }
  return c;
}

CheckResult check_valve_round_trip(Rand& r) {
  CheckResult c{"valve inversion: voltage round trip", 0, 0, 0.0, 1e-12};
  HydraulicActuatorParams p;
  p.area_a = 1.2e-3;
  p.area_b = 8e-4;
  p.bulk_modulus = 1e9;
  p.c_p1 = p.c_p2 = p.c_n1 = p.c_n2 = 3.5e-8;
  p.supply_pressure = 185e5;
  p.return_pressure = 10e5;
  p.stroke = 0.30;
  for (int state = 0; state < 20; ++state) {
    const ActuatorState s{r(0.02, 0.28), r(-0.5, 0.5), r(12e5, 183e5), r(12e5, 183e5)};
    for (int i = 0; i <= 40; ++i) {
      const double u = -10.0 + 0.5 * i;
      const ChamberFlows f = valve_flows(p, s, u);
      const double back = voltage_from_uf(p, s, uf_from_flows(p, s, f.q_a, f.q_b));
      record(c, std::abs(back - u) / std::max(1.0, std::abs(u)));
    }
  }
  return c;
}

CheckResult check_static_virtual_work(Rand& r) {
  CheckResult c{"static force: virtual-work balance against gravity", 0, 0, 0.0, 1e-8};
  const Vec3 gravity = {0, -9.81, 0};
  for (int trial = 0; trial < 50; ++trial) {
    const ManipulatorModel m = rand_single_structure(r, gravity);
    JointState js = rand_joint(r, m.structures[0].geom, 0.0);
    js.dq = 0.0;
    const KinematicTrace tr = forward_kinematics(m, {js});
    const BackwardResult bw = backward_pass(m, tr, SpatialVec::Zero());
    auto potential = [&](double q) {
      JointState p = js;
      p.q = q;
      const KinematicTrace t2 = forward_kinematics(m, {p});
      const StructureTrace& st = t2.structures[0];
      const Structure& s = m.structures[0];
      double u = 0.0;
      auto add = [&](const BodyParams& b, const FramePose& pose) {
        u -= b.mass * gravity.dot(pose.origin + pose.rotation * b.com_offset);
      };
      add(s.body_base_link, st.pose_bc);
      add(s.body_distal_link, st.pose_b1);
      add(s.body_cyl_case, st.pose_b3);
      add(s.body_piston, st.pose_b4);
      return u;
    };
    const double h = 1e-5;
    const double dudq = (potential(js.q - 2 * h) - 8 * potential(js.q - h) +
                         8 * potential(js.q + h) - potential(js.q + 2 * h)) /
                        (12 * h);
    const ClosureState& cs = tr.structures[0].closure;
    const double dxdq = -m.structures[0].geom.link_base * m.structures[0].geom.link_distal *
                        std::sin(cs.q) / (cs.x + m.structures[0].geom.cyl_base_len);
    const double f_expect = dudq / dxdq;
    record(c, std::abs(bw.structures[0].f_c - f_expect) / std::max(1.0, std::abs(f_expect)));
  }
  return c;
}

CheckResult check_config_model(const LoadedConfig& cfg, Rand& r) {
  CheckResult c{"config model: forward dynamics inverts inverse dynamics", 0, 0, 0.0, 1e-6};
  const ManipulatorModel& m = cfg.model;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<JointState> js(m.structures.size());
    std::vector<JointAccel> acc(m.structures.size());
    for (size_t j = 0; j < m.structures.size(); ++j) {
      js[j] = rand_joint(r, m.structures[j].geom, 0.5);
      acc[j].ddq = r(-1.0, 1.0);
      if (m.structures[j].prismatic) {
        js[j].xt = 0.5 * m.structures[j].prismatic->stroke;
        js[j].dxt = r(-0.1, 0.1);
        acc[j].ddxt = r(-1.0, 1.0);
      }
    }
    KinematicTrace tr = forward_kinematics(m, js);
    propagate_accelerations(m, tr, acc);
    const BackwardResult bw = backward_pass(m, tr, SpatialVec::Zero());
    std::vector<PistonForces> forces(m.structures.size());
    for (size_t j = 0; j < m.structures.size(); ++j) {
      forces[j].f_c = bw.structures[j].f_c;
      if (bw.structures[j].pris) forces[j].f_ct = bw.structures[j].pris->f_ct;
    }
    const std::vector<JointAccel> rec = forward_dynamics(m, js, forces);
    for (size_t j = 0; j < m.structures.size(); ++j) {
      record(c, std::abs(rec[j].ddq - acc[j].ddq) / std::max(1.0, std::abs(acc[j].ddq)));
      if (m.structures[j].prismatic)
        record(c, std::abs(rec[j].ddxt - acc[j].ddxt) / std::max(1.0, std::abs(acc[j].ddxt)));
    }
  }
  return c;
}

}  // namespace

bool SelfCheckReport::passed() const {
  for (const CheckResult& c : checks)
    if (!c.passed()) return false;
  return true;
}

int SelfCheckReport::checks_passed() const {
  int n = 0;
  for (const CheckResult& c : checks) n += c.passed();
  return n;
}

SelfCheckReport run_selfcheck(const LoadedConfig* config) {
  Rand r;
  SelfCheckReport rep;
  rep.checks.push_back(check_actuator_force_oracle(r));
  rep.checks.push_back(check_driven_wrench_oracle(r));
  rep.checks.push_back(check_closure_differentials(r));
  rep.checks.push_back(check_valve_round_trip(r));
  rep.checks.push_back(check_static_virtual_work(r));
  if (config) rep.checks.push_back(check_config_model(*config, r));
  return rep;
}

}  // namespace vdc
