#include "vdc/hydraulics.hpp"

#include <cmath>
#include <sstream>

namespace vdc {

namespace {

constexpr double kPressureGuard = 1e2;  // Pa band around supply/return

// Signed square root of a pressure drop.
double upsilon(double dp) { return (dp >= 0.0 ? 1.0 : -1.0) * std::sqrt(std::abs(dp)); }

void check_chamber(const HydraulicActuatorParams& p, const ActuatorState& s) {
  if (s.x <= 0.0 || s.x >= p.stroke) throw StrokeLimit("piston outside the cylinder");
  if (s.p_a > p.supply_pressure - kPressureGuard || s.p_a < p.return_pressure + kPressureGuard ||
      s.p_b > p.supply_pressure - kPressureGuard || s.p_b < p.return_pressure + kPressureGuard) {
    std::ostringstream msg;
    msg << "chamber pressures (" << s.p_a << ", " << s.p_b
        << ") Pa outside the open interval (" << p.return_pressure << ", "
        << p.supply_pressure << ")";
    throw PressureBound(msg.str());
  }
}

}  // namespace

void HydraulicActuatorParams::validate() const {
  if (area_a <= 0.0 || area_b <= 0.0) throw ModelError("chamber areas must be positive");
  if (bulk_modulus <= 0.0) throw ModelError("bulk modulus must be positive");
  if (c_p1 <= 0.0 || c_p2 <= 0.0 || c_n1 <= 0.0 || c_n2 <= 0.0)
    throw ModelError("valve flow coefficients must be positive");
  if (supply_pressure <= return_pressure || return_pressure < 0.0)
    throw ModelError("need supply pressure > return pressure >= 0");
  if (stroke <= 0.0) throw ModelError("actuator stroke must be positive");
}

void FrictionParams::validate() const {
  if (coulomb < 0.0 || viscous < 0.0 || transition_velocity <= 0.0)
    throw ModelError("friction parameters must be non-negative, transition velocity positive");
}

double piston_force_from_pressures(const HydraulicActuatorParams& p, const ActuatorState& s) {
  return p.area_a * s.p_a - p.area_b * s.p_b;
}

PressureRates chamber_pressure_rates(const HydraulicActuatorParams& p, const ActuatorState& s,
                                     double q_a, double q_b) {
  if (s.x <= 0.0 || s.x >= p.stroke) throw StrokeLimit("piston outside the cylinder");
  PressureRates out;
  out.dp_a = p.bulk_modulus / p.area_a * (q_a / s.x - p.area_a * s.dx / s.x);
  out.dp_b = p.bulk_modulus / p.area_b * (q_b / (p.stroke - s.x) + p.area_b * s.dx / (p.stroke - s.x));
  return out;
}

ChamberFlows valve_flows(const HydraulicActuatorParams& p, const ActuatorState& s, double u) {
  check_chamber(p, s);
  ChamberFlows out;
  if (u >= 0.0) {
    out.q_a = p.c_p1 * upsilon(p.supply_pressure - s.p_a) * u;
    out.q_b = -p.c_n2 * upsilon(s.p_b - p.return_pressure) * u;
  } else {
    out.q_a = p.c_n1 * upsilon(s.p_a - p.return_pressure) * u;
    out.q_b = -p.c_p2 * upsilon(p.supply_pressure - s.p_b) * u;
  }
  return out;
}

double uf_from_flows(const HydraulicActuatorParams& p, const ActuatorState& s, double q_a,
                     double q_b) {
  if (s.x <= 0.0 || s.x >= p.stroke) throw StrokeLimit("piston outside the cylinder");
  return q_a / s.x - q_b / (p.stroke - s.x);
}

double voltage_from_uf(const HydraulicActuatorParams& p, const ActuatorState& s, double u_f) {
  check_chamber(p, s);
  // With admissible pressures both branch gains are strictly positive, so
  // the branch is picked by the sign of u_f alone.
  if (u_f >= 0.0) {
    const double gain = p.c_p1 * upsilon(p.supply_pressure - s.p_a) / s.x +
                        p.c_n2 * upsilon(s.p_b - p.return_pressure) / (p.stroke - s.x);
    return u_f / gain;
  }
  const double gain = p.c_n1 * upsilon(s.p_a - p.return_pressure) / s.x +
                      p.c_p2 * upsilon(p.supply_pressure - s.p_b) / (p.stroke - s.x);
  return u_f / gain;
}

double friction_force(const FrictionParams& f, double dx) {
  return f.coulomb * std::tanh(dx / f.transition_velocity) + f.viscous * dx;
}

}  // namespace vdc
