#pragma once

#include "vdc/errors.hpp"

namespace vdc {

/// Cylinder, supply and valve parameters of one linear hydraulic actuator.
struct HydraulicActuatorParams {
  double area_a = 0.0;   // m^2, piston-side chamber
  double area_b = 0.0;   // m^2, rod-side chamber
  double bulk_modulus = 0.0;  // Pa
  double c_p1 = 0.0;  // (m^3/s)/(V sqrt(Pa)), supply->a, u > 0
  double c_p2 = 0.0;  // supply->b, u < 0
  double c_n1 = 0.0;  // a->return, u < 0
  double c_n2 = 0.0;  // b->return, u > 0
  double supply_pressure = 0.0;  // Pa
  double return_pressure = 0.0;  // Pa
  double stroke = 0.0;           // m

  void validate() const;
};

/// Piston position/velocity and chamber pressures of one actuator.
struct ActuatorState {
  double x = 0.0;    // m
  double dx = 0.0;   // m/s
  double p_a = 0.0;  // Pa
  double p_b = 0.0;  // Pa
};

/// Smooth Coulomb (tanh) plus viscous friction; increasing, continuous
/// and antisymmetric in the piston velocity.
struct FrictionParams {
  double coulomb = 0.0;              // N
  double viscous = 0.0;              // N s/m
  double transition_velocity = 1e-3; // m/s

  void validate() const;
};

struct ChamberFlows {
  double q_a = 0.0;  // m^3/s
  double q_b = 0.0;
};

struct PressureRates {
  double dp_a = 0.0;  // Pa/s
  double dp_b = 0.0;
};

double piston_force_from_pressures(const HydraulicActuatorParams& p, const ActuatorState& s);

PressureRates chamber_pressure_rates(const HydraulicActuatorParams& p, const ActuatorState& s,
                                     double q_a, double q_b);

ChamberFlows valve_flows(const HydraulicActuatorParams& p, const ActuatorState& s, double u);

/// Voltage-related term u_f = Q_a/x - Q_b/(s - x).
double uf_from_flows(const HydraulicActuatorParams& p, const ActuatorState& s,
                     double q_a, double q_b);

/// Exact inverse of the flow equations on the admissible pressure set.
/// Throws PressureBound when a chamber pressure sits within the guard
/// band of the supply or return pressure.
double voltage_from_uf(const HydraulicActuatorParams& p, const ActuatorState& s, double u_f);

double friction_force(const FrictionParams& f, double dx);

}  // namespace vdc
