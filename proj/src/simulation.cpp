#include "vdc/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace vdc {

namespace {

int state_width(const Structure& s) { return s.prismatic ? 8 : 4; }

}  // namespace

Eigen::VectorXd pack_state(const ManipulatorModel& model, const PlantState& s) {
  int n = 0;
  for (const Structure& st : model.structures) n += state_width(st);
  Eigen::VectorXd y(n);
  int k = 0;
  for (size_t j = 0; j < model.structures.size(); ++j) {
    const StructurePlantState& ps = s.structures[j];
    y(k++) = ps.joint.q;
    y(k++) = ps.joint.dq;
    y(k++) = ps.p_a;
    y(k++) = ps.p_b;
    if (model.structures[j].prismatic) {
      y(k++) = ps.joint.xt;
      y(k++) = ps.joint.dxt;
      y(k++) = ps.p_at;
      y(k++) = ps.p_bt;
    }
  }
  return y;
}

PlantState unpack_state(const ManipulatorModel& model, const Eigen::VectorXd& y) {
  PlantState s;
  s.structures.resize(model.structures.size());
  int k = 0;
  for (size_t j = 0; j < model.structures.size(); ++j) {
    StructurePlantState& ps = s.structures[j];
    ps.joint.q = y(k++);
    ps.joint.dq = y(k++);
    ps.p_a = y(k++);
    ps.p_b = y(k++);
    if (model.structures[j].prismatic) {
      ps.joint.xt = y(k++);
      ps.joint.dxt = y(k++);
      ps.p_at = y(k++);
      ps.p_bt = y(k++);
    }
  }
  return s;
}

PlantState plant_derivative(const ManipulatorModel& model, const PlantState& state,
                            const std::vector<double>& u_revolute,
                            const std::vector<double>& u_prismatic,
                            const SpatialVec& tool_wrench) {
  const size_t n = model.structures.size();
  if (u_revolute.size() != n || u_prismatic.size() != n)
    throw ModelError("plant derivative: one voltage per actuator required");

  std::vector<JointState> joints(n);
  for (size_t j = 0; j < n; ++j) joints[j] = state.structures[j].joint;
  const KinematicTrace trace = forward_kinematics(model, joints);

  std::vector<PistonForces> forces(n);
  std::vector<ActuatorState> rev(n), pris(n);
  for (size_t j = 0; j < n; ++j) {
    const Structure& s = model.structures[j];
    const StructurePlantState& ps = state.structures[j];
    const ClosureState& cs = trace.structures[j].closure;
    rev[j] = {cs.x, cs.dx, ps.p_a, ps.p_b};
    forces[j].f_c =
        piston_force_from_pressures(s.actuator, rev[j]) - friction_force(s.friction, cs.dx);
    if (s.prismatic) {
      pris[j] = {ps.joint.xt, ps.joint.dxt, ps.p_at, ps.p_bt};
      forces[j].f_ct = piston_force_from_pressures(s.prismatic->actuator, pris[j]) -
                       friction_force(s.prismatic->friction, ps.joint.dxt);
    }
  }
  const std::vector<JointAccel> acc = forward_dynamics(model, joints, forces, tool_wrench);

  PlantState d;
  d.structures.resize(n);
  for (size_t j = 0; j < n; ++j) {
    const Structure& s = model.structures[j];
    StructurePlantState& dd = d.structures[j];
    dd.joint.q = state.structures[j].joint.dq;
    dd.joint.dq = acc[j].ddq;
    const ChamberFlows qf = valve_flows(s.actuator, rev[j], u_revolute[j]);
    const PressureRates pr = chamber_pressure_rates(s.actuator, rev[j], qf.q_a, qf.q_b);
    dd.p_a = pr.dp_a;
    dd.p_b = pr.dp_b;
    if (s.prismatic) {
      dd.joint.xt = state.structures[j].joint.dxt;
      dd.joint.dxt = acc[j].ddxt;
      const ChamberFlows qt = valve_flows(s.prismatic->actuator, pris[j], u_prismatic[j]);
      const PressureRates pt =
          chamber_pressure_rates(s.prismatic->actuator, pris[j], qt.q_a, qt.q_b);
      dd.p_at = pt.dp_a;
      dd.p_bt = pt.dp_b;
    }
  }
  return d;
}

PlantState passive_derivative(const ManipulatorModel& model, const PlantState& state,
                              const std::vector<PistonForces>& forces,
                              const SpatialVec& tool_wrench) {
  const size_t n = model.structures.size();
  std::vector<JointState> joints(n);
  for (size_t j = 0; j < n; ++j) joints[j] = state.structures[j].joint;
  const std::vector<JointAccel> acc = forward_dynamics(model, joints, forces, tool_wrench);
  PlantState d;
  d.structures.resize(n);
  for (size_t j = 0; j < n; ++j) {
    d.structures[j].joint.q = state.structures[j].joint.dq;
    d.structures[j].joint.dq = acc[j].ddq;
    if (model.structures[j].prismatic) {
      d.structures[j].joint.xt = state.structures[j].joint.dxt;
      d.structures[j].joint.dxt = acc[j].ddxt;
    }
  }
  return d;
}

Eigen::VectorXd rk4_step(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                         const Eigen::VectorXd& y, double h) {
  const Eigen::VectorXd k1 = f(y);
  const Eigen::VectorXd k2 = f(y + 0.5 * h * k1);
  const Eigen::VectorXd k3 = f(y + 0.5 * h * k2);
  const Eigen::VectorXd k4 = f(y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::pair<double, double> static_chamber_pressures(const HydraulicActuatorParams& p,
                                                   double piston_force) {
  const double mean = 0.5 * (p.supply_pressure + p.return_pressure);
  const double p_a = (piston_force + 2.0 * mean * p.area_b) / (p.area_a + p.area_b);
  const double p_b = 2.0 * mean - p_a;
  const double guard = 1e3;
  if (p_a <= p.return_pressure + guard || p_a >= p.supply_pressure - guard ||
      p_b <= p.return_pressure + guard || p_b >= p.supply_pressure - guard) {
    std::ostringstream msg;
    msg << "static force " << piston_force << " N needs chamber pressures (" << p_a << ", "
        << p_b << ") Pa outside the supply/return interval";
    throw PressureBound(msg.str());
  }
  return {p_a, p_b};
}

PlantState equilibrium_state(const ManipulatorModel& model,
                             const std::vector<JointState>& joints,
                             const SpatialVec& tool_wrench) {
  std::vector<JointState> at_rest = joints;
  for (JointState& js : at_rest) js.dq = js.dxt = 0.0;
  KinematicTrace trace = forward_kinematics(model, at_rest);
  const std::vector<JointAccel> zero(model.structures.size());
  propagate_accelerations(model, trace, zero);
  const BackwardResult bw = backward_pass(model, trace, tool_wrench);

  PlantState s;
  s.structures.resize(model.structures.size());
  for (size_t j = 0; j < model.structures.size(); ++j) {
    s.structures[j].joint = at_rest[j];
    std::tie(s.structures[j].p_a, s.structures[j].p_b) =
        static_chamber_pressures(model.structures[j].actuator, bw.structures[j].f_c);
    if (model.structures[j].prismatic)
      std::tie(s.structures[j].p_at, s.structures[j].p_bt) = static_chamber_pressures(
          model.structures[j].prismatic->actuator, bw.structures[j].pris->f_ct);
  }
  return s;
}

SimulationResult run_scenario(const ManipulatorModel& model, const ControllerGains& gains,
                              const Scenario& scenario) {
  if (scenario.points.empty()) throw ModelError("scenario needs at least one waypoint");
  if (scenario.step <= 0.0) throw ModelError("scenario step must be positive");
  if (scenario.substeps < 1) throw ModelError("scenario substeps must be at least 1");
  const size_t n = model.structures.size();

  // Waypoints: start point, then each loop visits the remaining points and
  // returns; a dwell (duplicated waypoint) follows every move so the tool
  // comes to rest before the next leg.
  std::vector<std::vector<JointState>> waypoints;
  auto push = [&](const Vec3& p) {
    const std::vector<JointState> js = planar_ik(model, p, scenario.elbow_up);
    waypoints.push_back(js);
    waypoints.push_back(js);  // dwell leg
  };
  push(scenario.points.front());
  for (int loop = 0; loop < scenario.loops; ++loop) {
    for (size_t i = 1; i < scenario.points.size(); ++i) push(scenario.points[i]);
    push(scenario.points.front());
  }
  const JointPath path(waypoints, scenario.leg_duration, scenario.hold_time);
  const double t_end = path.total_time();

  PlantState plant = equilibrium_state(model, waypoints.front(), scenario.tool_wrench);
  Controller ctrl(model, gains, scenario.step);

  SimulationResult res;
  res.min_pressure = std::numeric_limits<double>::infinity();
  res.max_pressure = -res.min_pressure;

  // Column layout.
  TraceTable& tab = res.trace;
  tab.columns.push_back("t_s");
  for (size_t j = 0; j < n; ++j) {
    const std::string i = std::to_string(j);
    for (const char* c : {"qd", "q", "dq", "x", "dx", "pa", "pb", "u", "fp", "fpr", "nu",
                          "rhs", "vpf_driven", "vpf_tip"})
      tab.columns.push_back(std::string(c) + i);
    if (model.structures[j].prismatic)
      for (const char* c : {"xtd", "xt", "dxt", "pat", "pbt", "ut", "fpt", "fptr"})
        tab.columns.push_back(std::string(c) + i);
  }
  for (const char* c : {"tool_x", "tool_y", "toold_x", "toold_y", "tool_err", "vpf_resid"})
    tab.columns.push_back(c);

  const int steps = static_cast<int>(std::llround(t_end / scenario.step));
  double last_moving_t = 0.0;
  for (int k = 0; k <= steps; ++k) {
    const double t = k * scenario.step;
    const TrajectorySample desired = path.sample(t);

    ControlOutput out = ctrl.step(plant, desired, scenario.tool_wrench);
    const StabilityRow stab = accompanying_values(model, gains, out);

    // Desired tool position from the desired joint values.
    std::vector<JointState> des_js(n);
    for (size_t j = 0; j < n; ++j) {
      des_js[j].q = desired[j].q;
      des_js[j].xt = desired[j].xt;
    }
    const KinematicTrace des_tr = forward_kinematics(model, des_js);
    const Vec3 tool = out.trace.tool_pose.origin;
    const Vec3 tool_d = des_tr.tool_pose.origin;
    const double err = (tool - tool_d).head<2>().norm();

    bool moving = false;
    for (size_t j = 0; j < n; ++j)
      moving = moving || std::abs(desired[j].dq) > 0.0 || std::abs(desired[j].dxt) > 0.0;
    if (moving) last_moving_t = t;
    const bool steady = !moving && (t - last_moving_t) >= 0.5 * scenario.leg_duration;

    res.max_tool_error = std::max(res.max_tool_error, err);
    if (steady) res.max_steady_tool_error = std::max(res.max_steady_tool_error, err);

    std::vector<double> row;
    row.push_back(t);
    for (size_t j = 0; j < n; ++j) {
      const StructurePlantState& ps = plant.structures[j];
      const StructureTrace& st = out.trace.structures[j];
      row.insert(row.end(),
                 {desired[j].q, ps.joint.q, ps.joint.dq, st.closure.x, st.closure.dx,
                  ps.p_a, ps.p_b, out.revolute[j].u, out.revolute[j].f_p_measured,
                  out.revolute[j].f_p_required, stab.structures[j].nu,
                  stab.structures[j].rhs, stab.structures[j].vpf_driven,
                  stab.structures[j].vpf_tip});
      res.max_abs_voltage = std::max(res.max_abs_voltage, std::abs(out.revolute[j].u));
      res.min_pressure = std::min({res.min_pressure, ps.p_a, ps.p_b});
      res.max_pressure = std::max({res.max_pressure, ps.p_a, ps.p_b});
      if (model.structures[j].prismatic) {
        row.insert(row.end(),
                   {desired[j].xt, ps.joint.xt, ps.joint.dxt, ps.p_at, ps.p_bt,
                    out.prismatic[j].u, out.prismatic[j].f_p_measured,
                    out.prismatic[j].f_p_required});
        res.max_abs_voltage = std::max(res.max_abs_voltage, std::abs(out.prismatic[j].u));
        res.min_pressure = std::min({res.min_pressure, ps.p_at, ps.p_bt});
        res.max_pressure = std::max({res.max_pressure, ps.p_at, ps.p_bt});
      }
    }
    row.insert(row.end(), {tool.x(), tool.y(), tool_d.x(), tool_d.y(), err,
                           stab.telescoping_residual});
    tab.rows.push_back(std::move(row));

    if (k == steps) break;

    std::vector<double> u_rev(n, 0.0), u_pris(n, 0.0);
    for (size_t j = 0; j < n; ++j) {
      u_rev[j] = out.revolute[j].u;
      u_pris[j] = out.prismatic[j].u;
    }
    auto f = [&](const Eigen::VectorXd& y) {
      return pack_state(model,
                        plant_derivative(model, unpack_state(model, y), u_rev, u_pris,
                                         scenario.tool_wrench));
    };
    // Sub-step the plant under the held voltages: the friction curve is stiff
    // near zero velocity, and the control period alone under-resolves it.
    const double h = scenario.step / scenario.substeps;
    Eigen::VectorXd y = pack_state(model, plant);
    for (int s = 0; s < scenario.substeps; ++s) y = rk4_step(f, y, h);
    plant = unpack_state(model, y);
  }
  return res;
}

}  // namespace vdc
