#pragma once

#include <vector>

#include "vdc/controller.hpp"

namespace vdc {

/// Virtual power flow at a cut frame: inner product of the velocity error
/// and the wrench error.
double vpf(const SpatialVec& v_r, const SpatialVec& v, const SpatialVec& f_r,
           const SpatialVec& f);

/// Stability ledger of one structure at one instant.
struct StructureStability {
  double nu = 0.0;          // J, total accompanying value
  double nu_frames = 0.0;   // J, rigid-body part
  double nu_p = 0.0;        // J, loop actuator force-error part
  double nu_pt = 0.0;       // J, prismatic actuator part
  double rhs = 0.0;         // W, analytic bound on d(nu)/dt
  double vpf_driven = 0.0;  // W, at the driven point
  double vpf_tip = 0.0;     // W, at the tip cut frame
};

struct StabilityRow {
  std::vector<StructureStability> structures;
  double telescoping_residual = 0.0;  // W, interior-cut VPF mismatch
};

/// Evaluates the accompanying functions, the analytic derivative bound and
/// the cut-frame virtual power flows from one control step's diagnostics.
StabilityRow accompanying_values(const ManipulatorModel& model, const ControllerGains& gains,
                                 const ControlOutput& out);

/// Sum over interior cut frames of (tip-side VPF minus the next driven-side
/// VPF); zero up to roundoff for consistent traces.
double vpf_telescoping_check(const StabilityRow& row);

}  // namespace vdc
