#include "vdc/controller.hpp"

#include <algorithm>
#include <cmath>

namespace vdc {

void StructureGains::validate() const {
  if (lambda <= 0.0 || lambda_t <= 0.0 || k_x <= 0.0 || k_f <= 0.0 || k_xt <= 0.0 ||
      k_ft <= 0.0)
    throw ModelError("controller gains must be positive");
  if ((k_a - k_a.transpose()).cwiseAbs().maxCoeff() > 1e-9)
    throw ModelError("velocity-error gain matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat6> es(k_a);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw ModelError("velocity-error gain matrix must be positive definite");
}

void ControllerGains::validate(const ManipulatorModel& model) const {
  if (structures.size() != model.structures.size())
    throw ModelError("one gain set per structure required");
  for (const StructureGains& g : structures) g.validate();
}

double required_uf(const HydraulicActuatorParams& p, const ActuatorState& s, double k_x,
                   double k_f, double dx_required, double f_p_required,
                   double df_p_required, double f_p_measured) {
  if (s.x <= 0.0 || s.x >= p.stroke) throw StrokeLimit("piston outside the cylinder");
  return df_p_required / p.bulk_modulus +
         (p.area_a / s.x + p.area_b / (p.stroke - s.x)) * s.dx +
         k_x * (dx_required - s.dx) + k_f * (f_p_required - f_p_measured);
}

double control_voltage(const HydraulicActuatorParams& p, const ActuatorState& s,
                       double u_f_required) {
  const double u = voltage_from_uf(p, s, u_f_required);
  return std::clamp(u, -kVoltageLimit, kVoltageLimit);
}

Controller::Controller(const ManipulatorModel& model, const ControllerGains& gains,
                       double period, double filter_time_constant)
    : model_(&model), gains_(gains), period_(period) {
  if (period <= 0.0) throw ModelError("control period must be positive");
  gains_.validate(model);
  const double tau = filter_time_constant > 0.0 ? filter_time_constant : 10.0 * period;
  filter_alpha_ = std::exp(-period / tau);
  const size_t n = model.structures.size();
  prev_fp_r_.assign(n, 0.0);
  dfp_r_filt_.assign(n, 0.0);
  prev_fpt_r_.assign(n, 0.0);
  dfpt_r_filt_.assign(n, 0.0);
}

void Controller::reset() {
  primed_ = false;
  std::fill(prev_fp_r_.begin(), prev_fp_r_.end(), 0.0);
  std::fill(dfp_r_filt_.begin(), dfp_r_filt_.end(), 0.0);
  std::fill(prev_fpt_r_.begin(), prev_fpt_r_.end(), 0.0);
  std::fill(dfpt_r_filt_.begin(), dfpt_r_filt_.end(), 0.0);
}

ControlOutput Controller::step(const PlantState& measured, const TrajectorySample& desired,
                               const SpatialVec& tool_wrench) {
  const ManipulatorModel& model = *model_;
  const size_t n = model.structures.size();
  if (measured.structures.size() != n || desired.size() != n)
    throw ModelError("control step: state/target size mismatch");

  ControlOutput out;
  out.revolute.resize(n);
  out.prismatic.resize(n);

  // Measured kinematics, base to tip.
  std::vector<JointState> js(n);
  for (size_t j = 0; j < n; ++j) js[j] = measured.structures[j].joint;
  out.trace = forward_kinematics(model, js);

  // Measured piston forces from pressures; measured accelerations follow
  // from the rigid-body model driven by those forces.
  std::vector<PistonForces> piston(n);
  for (size_t j = 0; j < n; ++j) {
    const Structure& s = model.structures[j];
    const StructurePlantState& ps = measured.structures[j];
    const ClosureState& cs = out.trace.structures[j].closure;
    ActuatorState as{cs.x, cs.dx, ps.p_a, ps.p_b};
    out.revolute[j].f_p_measured = piston_force_from_pressures(s.actuator, as);
    out.revolute[j].dx_measured = cs.dx;
    piston[j].f_c = out.revolute[j].f_p_measured - friction_force(s.friction, cs.dx);
    if (s.prismatic) {
      ActuatorState ast{ps.joint.xt, ps.joint.dxt, ps.p_at, ps.p_bt};
      out.prismatic[j].f_p_measured = piston_force_from_pressures(s.prismatic->actuator, ast);
      out.prismatic[j].dx_measured = ps.joint.dxt;
      piston[j].f_ct =
          out.prismatic[j].f_p_measured - friction_force(s.prismatic->friction, ps.joint.dxt);
    }
  }
  const std::vector<JointAccel> acc = forward_dynamics(model, js, piston, tool_wrench);
  propagate_accelerations(model, out.trace, acc);
  out.measured_forces = backward_pass(model, out.trace, tool_wrench, false);

  // Required joint rates and accelerations with position feedback.
  std::vector<JointState> js_r(n);
  std::vector<JointAccel> acc_r(n);
  for (size_t j = 0; j < n; ++j) {
    const StructureGains& g = gains_.structures[j];
    const JointTarget& d = desired[j];
    js_r[j].q = js[j].q;
    js_r[j].dq = d.dq + g.lambda * (d.q - js[j].q);
    acc_r[j].ddq = d.ddq + g.lambda * (d.dq - js[j].dq);
    if (model.structures[j].prismatic) {
      js_r[j].xt = js[j].xt;
      js_r[j].dxt = d.dxt + g.lambda_t * (d.xt - js[j].xt);
      acc_r[j].ddxt = d.ddxt + g.lambda_t * (d.dxt - js[j].dxt);
    }
  }
  propagate_required(model, out.trace, js_r, acc_r);

  std::vector<Mat6> k_a(n);
  for (size_t j = 0; j < n; ++j) k_a[j] = gains_.structures[j].k_a;
  out.required_forces = backward_pass(model, out.trace, tool_wrench, true, &k_a);

  // Valve terms and voltages.
  for (size_t j = 0; j < n; ++j) {
    const Structure& s = model.structures[j];
    const StructureGains& g = gains_.structures[j];
    const StructurePlantState& ps = measured.structures[j];
    const StructureTrace& st = out.trace.structures[j];

    ActuatorCommand& cmd = out.revolute[j];
    cmd.f_c_required = out.required_forces.structures[j].f_c;
    cmd.dx_required = st.rates_r.dx;
    cmd.f_p_required = cmd.f_c_required + friction_force(s.friction, cmd.dx_required);

    const double raw = primed_ ? (cmd.f_p_required - prev_fp_r_[j]) / period_ : 0.0;
    dfp_r_filt_[j] = filter_alpha_ * dfp_r_filt_[j] + (1.0 - filter_alpha_) * raw;
    prev_fp_r_[j] = cmd.f_p_required;

    const ActuatorState as{st.closure.x, st.closure.dx, ps.p_a, ps.p_b};
    cmd.u_f_required = required_uf(s.actuator, as, g.k_x, g.k_f, cmd.dx_required,
                                   cmd.f_p_required, dfp_r_filt_[j], cmd.f_p_measured);
    cmd.u = control_voltage(s.actuator, as, cmd.u_f_required);

    if (s.prismatic) {
      ActuatorCommand& tcmd = out.prismatic[j];
      tcmd.f_c_required = out.required_forces.structures[j].pris->f_ct;
      tcmd.dx_required = js_r[j].dxt;
      tcmd.f_p_required =
          tcmd.f_c_required + friction_force(s.prismatic->friction, tcmd.dx_required);

      const double traw = primed_ ? (tcmd.f_p_required - prev_fpt_r_[j]) / period_ : 0.0;
      dfpt_r_filt_[j] = filter_alpha_ * dfpt_r_filt_[j] + (1.0 - filter_alpha_) * traw;
      prev_fpt_r_[j] = tcmd.f_p_required;

      const ActuatorState ast{ps.joint.xt, ps.joint.dxt, ps.p_at, ps.p_bt};
      tcmd.u_f_required =
          required_uf(s.prismatic->actuator, ast, g.k_xt, g.k_ft, tcmd.dx_required,
                      tcmd.f_p_required, dfpt_r_filt_[j], tcmd.f_p_measured);
      tcmd.u = control_voltage(s.prismatic->actuator, ast, tcmd.u_f_required);
    }
  }
  primed_ = true;
  return out;
}

}  // namespace vdc
