#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vdc/stability.hpp"
#include "vdc/trajectory.hpp"

namespace vdc {

/// Column-oriented numeric record of one simulation run.
struct TraceTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // one vector per step, columns.size() wide
};

/// Tool-space scenario: rest-to-rest legs through a waypoint loop.
struct Scenario {
  std::vector<Vec3> points;   // tool positions, z ignored by the planar solver
  double leg_duration = 2.0;  // s
  int loops = 1;              // how many times the point list is traversed
  double hold_time = 0.5;     // s, settle at the first point before moving
  double step = 1e-3;         // s, control period (voltages held between samples)
  int substeps = 10;          // plant integrator steps per control period
  bool elbow_up = true;
  SpatialVec tool_wrench = SpatialVec::Zero();
};

/// Full plant derivative under held valve voltages: rigid-body forward
/// dynamics driven by the pressure forces minus friction, plus the chamber
/// continuity equations fed by the valve flows.
PlantState plant_derivative(const ManipulatorModel& model, const PlantState& state,
                            const std::vector<double>& u_revolute,
                            const std::vector<double>& u_prismatic,
                            const SpatialVec& tool_wrench = SpatialVec::Zero());

/// Mechanics-only derivative with ideal (massless, lossless) force sources
/// applying the given piston forces; used by the energy audit.
PlantState passive_derivative(const ManipulatorModel& model, const PlantState& state,
                              const std::vector<PistonForces>& forces,
                              const SpatialVec& tool_wrench = SpatialVec::Zero());

/// Classical fixed-step 4th-order step of dy/dt = f(y).
Eigen::VectorXd rk4_step(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                         const Eigen::VectorXd& y, double h);

/// PlantState <-> flat vector packing (q, dq, p_a, p_b [, xt, dxt, p_at,
/// p_bt] per structure).
Eigen::VectorXd pack_state(const ManipulatorModel& model, const PlantState& s);
PlantState unpack_state(const ManipulatorModel& model, const Eigen::VectorXd& y);

/// Chamber pressures realizing a given piston force with the mean pressure
/// centered between supply and return. Throws PressureBound when the
/// required pressures leave the admissible interval.
std::pair<double, double> static_chamber_pressures(const HydraulicActuatorParams& p,
                                                   double piston_force);

/// Plant state at rest at the given joints, pressures balancing gravity.
PlantState equilibrium_state(const ManipulatorModel& model,
                             const std::vector<JointState>& joints,
                             const SpatialVec& tool_wrench = SpatialVec::Zero());

struct SimulationResult {
  TraceTable trace;
  double max_abs_voltage = 0.0;
  double min_pressure = 0.0, max_pressure = 0.0;
  double max_tool_error = 0.0;         // m, over the whole run
  double max_steady_tool_error = 0.0;  // m, sampled while the path is at rest
};

/// Closed-loop run of the scenario: waypoint IK, quintic joint path,
/// control at the integration rate with zero-order-held voltages, RK4
/// plant, per-step stability ledger. Aborts (throws) on stroke or pressure
/// violations.
SimulationResult run_scenario(const ManipulatorModel& model, const ControllerGains& gains,
                              const Scenario& scenario);

}  // namespace vdc
