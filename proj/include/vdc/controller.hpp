#pragma once

#include <vector>

#include "vdc/newton_euler.hpp"

namespace vdc {

/// Mechanical and hydraulic state of one structure's plant.
struct StructurePlantState {
  JointState joint;
  double p_a = 0.0, p_b = 0.0;    // loop actuator chamber pressures, Pa
  double p_at = 0.0, p_bt = 0.0;  // prismatic actuator chambers (unused without one)
};

struct PlantState {
  std::vector<StructurePlantState> structures;
};

/// Desired motion of one structure's joints at one instant.
struct JointTarget {
  double q = 0.0, dq = 0.0, ddq = 0.0;
  double xt = 0.0, dxt = 0.0, ddxt = 0.0;
};
using TrajectorySample = std::vector<JointTarget>;

struct StructureGains {
  double lambda = 20.0;    // 1/s, joint position feedback
  double lambda_t = 20.0;  // 1/s, prismatic position feedback
  double k_x = 1e-5;       // valve-term velocity-error gain
  double k_f = 3e-7;       // valve-term force-error gain
  double k_xt = 1e-5;
  double k_ft = 3e-7;
  Mat6 k_a = 10.0 * Mat6::Identity();  // velocity-error gain of the net wrenches

  void validate() const;
};

struct ControllerGains {
  std::vector<StructureGains> structures;
  void validate(const ManipulatorModel& model) const;
};

/// Per-actuator result of one control step.
struct ActuatorCommand {
  double u = 0.0;             // V, saturated
  double u_f_required = 0.0;  // 1/s
  double f_p_required = 0.0;  // N, required piston force incl. friction
  double f_c_required = 0.0;  // N, required mechanical actuator force
  double f_p_measured = 0.0;  // N, from chamber pressures
  double dx_required = 0.0;   // m/s, required piston rate
  double dx_measured = 0.0;   // m/s
};

struct ControlOutput {
  std::vector<ActuatorCommand> revolute;   // one per structure
  std::vector<ActuatorCommand> prismatic;  // zeroed when no prismatic stage
  KinematicTrace trace;                    // measured + required kinematics
  BackwardResult measured_forces;
  BackwardResult required_forces;
};

/// Eq.-style required voltage-related term of one actuator.
double required_uf(const HydraulicActuatorParams& p, const ActuatorState& s, double k_x,
                   double k_f, double dx_required, double f_p_required,
                   double df_p_required, double f_p_measured);

/// Exact valve inversion of the required term, saturated to +-10 V.
double control_voltage(const HydraulicActuatorParams& p, const ActuatorState& s,
                       double u_f_required);

constexpr double kVoltageLimit = 10.0;  // V

/// Full control law: measured kinematics/dynamics, required kinematics and
/// forces, valve-term formation and voltage inversion. Holds the filtered
/// differentiator state of the required piston-force rates.
class Controller {
 public:
  Controller(const ManipulatorModel& model, const ControllerGains& gains, double period,
             double filter_time_constant = 0.0 /* 0: ten periods */);

  ControlOutput step(const PlantState& measured, const TrajectorySample& desired,
                     const SpatialVec& tool_wrench = SpatialVec::Zero());
  void reset();

  const ControllerGains& gains() const { return gains_; }
  double period() const { return period_; }

 private:
  const ManipulatorModel* model_;
  ControllerGains gains_;
  double period_;
  double filter_alpha_;
  bool primed_ = false;
  std::vector<double> prev_fp_r_, dfp_r_filt_;    // revolute actuators
  std::vector<double> prev_fpt_r_, dfpt_r_filt_;  // prismatic actuators
};

}  // namespace vdc
