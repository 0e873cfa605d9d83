#include "vdc/stability.hpp"

namespace vdc {

double vpf(const SpatialVec& v_r, const SpatialVec& v, const SpatialVec& f_r,
           const SpatialVec& f) {
  return (v_r - v).dot(f_r - f);
}

namespace {

double quad(const SpatialVec& err, const Mat6& m) { return err.dot(m * err); }

}  // namespace

StabilityRow accompanying_values(const ManipulatorModel& model, const ControllerGains& gains,
                                 const ControlOutput& out) {
  const size_t n = model.structures.size();
  StabilityRow row;
  row.structures.resize(n);

  for (size_t j = 0; j < n; ++j) {
    const Structure& s = model.structures[j];
    const StructureGains& g = gains.structures[j];
    const StructureTrace& st = out.trace.structures[j];
    StructureStability& r = row.structures[j];

    // Rigid-body accompanying values and the gain quadratic over the
    // structure's frame set.
    double k_sum = 0.0;
    auto add_frame = [&](const BodyParams& body, const FrameMotion& fm) {
      const SpatialVec err = fm.v_r - fm.v;
      r.nu_frames += 0.5 * err.dot(body.mass_matrix() * err);
      k_sum += quad(err, g.k_a);
    };
    add_frame(s.body_base_link, st.bc);
    add_frame(s.body_distal_link, st.b1);
    add_frame(s.body_cyl_case, st.b3);
    add_frame(s.body_piston, st.b4);
    if (st.pris) {
      add_frame(s.prismatic->body_case, st.pris->p2);
      add_frame(s.prismatic->body_piston, st.pris->b5);
      add_frame(s.prismatic->body_load, st.pris->p3);
    }

    const double fp_err = out.revolute[j].f_p_required - out.revolute[j].f_p_measured;
    r.nu_p = fp_err * fp_err / (2.0 * s.actuator.bulk_modulus * g.k_x);
    double fpt_err = 0.0;
    if (s.prismatic) {
      fpt_err = out.prismatic[j].f_p_required - out.prismatic[j].f_p_measured;
      r.nu_pt = fpt_err * fpt_err / (2.0 * s.prismatic->actuator.bulk_modulus * g.k_xt);
    }
    r.nu = r.nu_frames + r.nu_p + r.nu_pt;

    // Cut-frame virtual power flows. The driven point of structure j and
    // the tip frame of structure j-1 are the same physical cut.
    r.vpf_driven = vpf(st.bc.v_r, st.bc.v, out.required_forces.structures[j].f_bc,
                       out.measured_forces.structures[j].f_bc);
    if (j + 1 < n) {
      const FrameMotion& tipm = st.pris ? st.pris->e2 : st.e1;
      r.vpf_tip = vpf(tipm.v_r, tipm.v, out.required_forces.structures[j + 1].f_bc,
                      out.measured_forces.structures[j + 1].f_bc);
    } else {
      r.vpf_tip = 0.0;  // required tip wrench equals the measured tip load
    }

    r.rhs = -k_sum + r.vpf_driven - r.vpf_tip - (g.k_f / g.k_x) * fp_err * fp_err;
    if (s.prismatic) r.rhs -= (g.k_ft / g.k_xt) * fpt_err * fpt_err;
  }

  row.telescoping_residual = vpf_telescoping_check(row);
  return row;
}

double vpf_telescoping_check(const StabilityRow& row) {
  double resid = 0.0;
  for (size_t j = 0; j + 1 < row.structures.size(); ++j)
    resid += row.structures[j].vpf_tip - row.structures[j + 1].vpf_driven;
  return resid;
}

}  // namespace vdc
