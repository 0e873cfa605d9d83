#include "vdc/config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace vdc {

namespace {

struct Ctx {
  std::vector<std::string> errs;

  void fail(const std::string& path, const std::string& what) {
    errs.push_back(path + ": " + what);
  }
};

void check_keys(const YAML::Node& n, const std::string& path,
                const std::set<std::string>& allowed, Ctx& c) {
  if (!n || !n.IsMap()) return;
  for (const auto& kv : n) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) c.fail(path + "." + key, "unknown key");
  }
}

YAML::Node need(const YAML::Node& n, const char* key, const std::string& path, Ctx& c) {
  if (!n || !n.IsMap() || !n[key]) {
    c.fail(path + "." + key, "missing required key");
    return YAML::Node(YAML::NodeType::Undefined);
  }
  return n[key];
}

double num(const YAML::Node& n, const std::string& path, Ctx& c) {
  if (!n || !n.IsScalar()) {
    if (n) c.fail(path, "expected a number");
    return 0.0;
  }
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    c.fail(path, "expected a number");
    return 0.0;
  }
}

double num_or(const YAML::Node& parent, const char* key, double fallback,
              const std::string& path, Ctx& c) {
  if (!parent || !parent[key]) return fallback;
  return num(parent[key], path + "." + key, c);
}

double positive(const YAML::Node& n, const std::string& path, Ctx& c) {
  const double v = num(n, path, c);
  if (n && n.IsScalar() && v <= 0.0) c.fail(path, "must be positive");
  return v;
}

bool flag_or(const YAML::Node& parent, const char* key, bool fallback,
             const std::string& path, Ctx& c) {
  if (!parent || !parent[key]) return fallback;
  try {
    return parent[key].as<bool>();
  } catch (const YAML::Exception&) {
    c.fail(path + "." + key, "expected true/false");
    return fallback;
  }
}

Vec3 vec(const YAML::Node& n, size_t len, const std::string& path, Ctx& c) {
  Vec3 out = Vec3::Zero();
  if (!n || !n.IsSequence() || n.size() != len) {
    if (n) c.fail(path, "expected a sequence of " + std::to_string(len) + " numbers");
    return out;
  }
  for (size_t i = 0; i < len; ++i) out(i) = num(n[i], path + "[" + std::to_string(i) + "]", c);
  return out;
}

WrenchTransform attach(const YAML::Node& n, const std::string& path, Ctx& c) {
  check_keys(n, path, {"angle", "offset"}, c);
  const double ang = num_or(n, "angle", 0.0, path, c);
  Vec3 off = Vec3::Zero();
  if (n && n["offset"]) off = vec(n["offset"], 2, path + ".offset", c);
  return WrenchTransform::rot_z(ang, off);
}

BodyParams body(const YAML::Node& n, const Vec3& gravity, const std::string& path, Ctx& c) {
  check_keys(n, path, {"mass", "com", "inertia"}, c);
  BodyParams b;
  b.gravity_world = gravity;
  b.mass = num(need(n, "mass", path, c), path + ".mass", c);
  if (b.mass < 0.0) c.fail(path + ".mass", "must be non-negative");
  b.com_offset = vec(need(n, "com", path, c), 3, path + ".com", c);
  const Vec3 d = vec(need(n, "inertia", path, c), 3, path + ".inertia", c);
  b.inertia = d.asDiagonal();
  return b;
}

HydraulicActuatorParams hydraulics(const YAML::Node& n, double stroke,
                                   const std::string& path, Ctx& c) {
  check_keys(n,
             path, {"area_a", "area_b", "bulk_modulus", "c_p1", "c_p2", "c_n1", "c_n2",
                    "supply_pressure", "return_pressure"},
             c);
  HydraulicActuatorParams p;
  p.area_a = positive(need(n, "area_a", path, c), path + ".area_a", c);
  p.area_b = positive(need(n, "area_b", path, c), path + ".area_b", c);
  p.bulk_modulus = positive(need(n, "bulk_modulus", path, c), path + ".bulk_modulus", c);
  p.c_p1 = positive(need(n, "c_p1", path, c), path + ".c_p1", c);
  p.c_p2 = positive(need(n, "c_p2", path, c), path + ".c_p2", c);
  p.c_n1 = positive(need(n, "c_n1", path, c), path + ".c_n1", c);
  p.c_n2 = positive(need(n, "c_n2", path, c), path + ".c_n2", c);
  p.supply_pressure =
      positive(need(n, "supply_pressure", path, c), path + ".supply_pressure", c);
  p.return_pressure =
      num(need(n, "return_pressure", path, c), path + ".return_pressure", c);
  if (n && n["return_pressure"] &&
      (p.return_pressure < 0.0 || p.return_pressure >= p.supply_pressure))
    c.fail(path + ".return_pressure", "must satisfy 0 <= return < supply");
  p.stroke = stroke;
  return p;
}

FrictionParams friction(const YAML::Node& n, const std::string& path, Ctx& c) {
  check_keys(n, path, {"coulomb", "viscous", "transition_velocity"}, c);
  FrictionParams f;
  f.coulomb = num_or(n, "coulomb", 0.0, path, c);
  f.viscous = num_or(n, "viscous", 0.0, path, c);
  f.transition_velocity = num_or(n, "transition_velocity", 1e-3, path, c);
  if (f.coulomb < 0.0) c.fail(path + ".coulomb", "must be non-negative");
  if (f.viscous < 0.0) c.fail(path + ".viscous", "must be non-negative");
  if (f.transition_velocity <= 0.0) c.fail(path + ".transition_velocity", "must be positive");
  return f;
}

StructureGains gains(const YAML::Node& n, const std::string& path, Ctx& c) {
  check_keys(n, path, {"lambda", "lambda_t", "k_x", "k_f", "k_xt", "k_ft", "k_a"}, c);
  StructureGains g;
  g.lambda = num_or(n, "lambda", g.lambda, path, c);
  g.lambda_t = num_or(n, "lambda_t", g.lambda_t, path, c);
  g.k_x = num_or(n, "k_x", g.k_x, path, c);
  g.k_f = num_or(n, "k_f", g.k_f, path, c);
  g.k_xt = num_or(n, "k_xt", g.k_xt, path, c);
  g.k_ft = num_or(n, "k_ft", g.k_ft, path, c);
  g.k_a = num_or(n, "k_a", 10.0, path, c) * Mat6::Identity();
  return g;
}

PrismaticSegment prismatic(const YAML::Node& n, const Vec3& gravity,
                           const std::string& path, Ctx& c) {
  check_keys(n, path,
             {"attach", "base_len", "load_offset", "stroke", "bodies", "hydraulics",
              "friction"},
             c);
  PrismaticSegment p;
  p.attach = attach(n["attach"], path + ".attach", c);
  p.base_len = positive(need(n, "base_len", path, c), path + ".base_len", c);
  if (n && n["load_offset"])
    p.load_attach =
        WrenchTransform::translation(vec(n["load_offset"], 2, path + ".load_offset", c));
  p.stroke = positive(need(n, "stroke", path, c), path + ".stroke", c);
  const YAML::Node b = need(n, "bodies", path, c);
  check_keys(b, path + ".bodies", {"case", "piston", "load"}, c);
  p.body_case = body(need(b, "case", path + ".bodies", c), gravity, path + ".bodies.case", c);
  p.body_piston =
      body(need(b, "piston", path + ".bodies", c), gravity, path + ".bodies.piston", c);
  p.body_load = body(need(b, "load", path + ".bodies", c), gravity, path + ".bodies.load", c);
  p.actuator =
      hydraulics(need(n, "hydraulics", path, c), p.stroke, path + ".hydraulics", c);
  p.friction = friction(n["friction"], path + ".friction", c);
  return p;
}

Structure structure(const YAML::Node& n, const Vec3& gravity, const std::string& path,
                    Ctx& c, StructureGains& g_out) {
  check_keys(n, path,
             {"revolute", "bodies", "hydraulics", "friction", "gains", "prismatic"}, c);
  Structure s;
  const YAML::Node r = need(n, "revolute", path, c);
  const std::string rp = path + ".revolute";
  check_keys(r, rp,
             {"link_base", "link_distal", "cyl_base_len", "piston_len", "stroke", "attach"},
             c);
  s.geom.link_base = positive(need(r, "link_base", rp, c), rp + ".link_base", c);
  s.geom.link_distal = positive(need(r, "link_distal", rp, c), rp + ".link_distal", c);
  s.geom.cyl_base_len =
      positive(need(r, "cyl_base_len", rp, c), rp + ".cyl_base_len", c);
  s.geom.piston_len = positive(need(r, "piston_len", rp, c), rp + ".piston_len", c);
  s.geom.stroke = positive(need(r, "stroke", rp, c), rp + ".stroke", c);
  s.geom.base_attach = attach(r ? r["attach"] : YAML::Node(), rp + ".attach", c);

  const YAML::Node b = need(n, "bodies", path, c);
  check_keys(b, path + ".bodies", {"base_link", "distal_link", "cyl_case", "piston"}, c);
  s.body_base_link =
      body(need(b, "base_link", path + ".bodies", c), gravity, path + ".bodies.base_link", c);
  s.body_distal_link = body(need(b, "distal_link", path + ".bodies", c), gravity,
                            path + ".bodies.distal_link", c);
  s.body_cyl_case =
      body(need(b, "cyl_case", path + ".bodies", c), gravity, path + ".bodies.cyl_case", c);
  s.body_piston =
      body(need(b, "piston", path + ".bodies", c), gravity, path + ".bodies.piston", c);

  s.actuator =
      hydraulics(need(n, "hydraulics", path, c), s.geom.stroke, path + ".hydraulics", c);
  s.friction = friction(n["friction"], path + ".friction", c);
  g_out = gains(n["gains"], path + ".gains", c);
  if (n && n["prismatic"]) s.prismatic = prismatic(n["prismatic"], gravity, path + ".prismatic", c);
  return s;
}

Scenario scenario(const YAML::Node& n, const std::string& path, Ctx& c) {
  check_keys(n, path,
             {"points", "leg_duration", "loops", "hold_time", "step", "substeps",
              "elbow_up", "tool_force", "tool_moment"},
             c);
  Scenario sc;
  const YAML::Node pts = need(n, "points", path, c);
  if (pts && pts.IsSequence() && pts.size() >= 1) {
    for (size_t i = 0; i < pts.size(); ++i)
      sc.points.push_back(vec(pts[i], 2, path + ".points[" + std::to_string(i) + "]", c));
  } else if (pts) {
    c.fail(path + ".points", "expected a non-empty sequence of [x, y] pairs");
  }
  sc.leg_duration = num_or(n, "leg_duration", sc.leg_duration, path, c);
  if (sc.leg_duration <= 0.0) c.fail(path + ".leg_duration", "must be positive");
  if (n && n["loops"]) {
    sc.loops = static_cast<int>(num(n["loops"], path + ".loops", c));
    if (sc.loops < 1) c.fail(path + ".loops", "must be at least 1");
  }
  sc.hold_time = num_or(n, "hold_time", sc.hold_time, path, c);
  if (sc.hold_time < 0.0) c.fail(path + ".hold_time", "must be non-negative");
  sc.step = num_or(n, "step", sc.step, path, c);
  if (sc.step <= 0.0) c.fail(path + ".step", "must be positive");
  if (n && n["substeps"]) {
    sc.substeps = static_cast<int>(num(n["substeps"], path + ".substeps", c));
    if (sc.substeps < 1) c.fail(path + ".substeps", "must be at least 1");
  }
  sc.elbow_up = flag_or(n, "elbow_up", sc.elbow_up, path, c);
  if (n && n["tool_force"]) sc.tool_wrench.head<3>() = vec(n["tool_force"], 3, path + ".tool_force", c);
  if (n && n["tool_moment"]) sc.tool_wrench.tail<3>() = vec(n["tool_moment"], 3, path + ".tool_moment", c);
  return sc;
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

std::string fmt_vec(const Vec3& v, int len) {
  std::string out = "[" + fmt(v(0));
  for (int i = 1; i < len; ++i) out += ", " + fmt(v(i));
  return out + "]";
}

double attach_angle(const WrenchTransform& u) {
  return std::atan2(u.rotation(1, 0), u.rotation(0, 0));
}

void write_body(std::ostream& os, const std::string& indent, const char* name,
                const BodyParams& b) {
  os << indent << name << ": {mass: " << fmt(b.mass) << ", com: " << fmt_vec(b.com_offset, 3)
     << ", inertia: [" << fmt(b.inertia(0, 0)) << ", " << fmt(b.inertia(1, 1)) << ", "
     << fmt(b.inertia(2, 2)) << "]}\n";
}

void write_hydraulics(std::ostream& os, const std::string& indent,
                      const HydraulicActuatorParams& p) {
  os << indent << "hydraulics:\n"
     << indent << "  area_a: " << fmt(p.area_a) << "\n"
     << indent << "  area_b: " << fmt(p.area_b) << "\n"
     << indent << "  bulk_modulus: " << fmt(p.bulk_modulus) << "\n"
     << indent << "  c_p1: " << fmt(p.c_p1) << "\n"
     << indent << "  c_p2: " << fmt(p.c_p2) << "\n"
     << indent << "  c_n1: " << fmt(p.c_n1) << "\n"
     << indent << "  c_n2: " << fmt(p.c_n2) << "\n"
     << indent << "  supply_pressure: " << fmt(p.supply_pressure) << "\n"
     << indent << "  return_pressure: " << fmt(p.return_pressure) << "\n";
}

void write_friction(std::ostream& os, const std::string& indent, const FrictionParams& f) {
  os << indent << "friction: {coulomb: " << fmt(f.coulomb) << ", viscous: " << fmt(f.viscous)
     << ", transition_velocity: " << fmt(f.transition_velocity) << "}\n";
}

}  // namespace

LoadedConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream msg;
    msg << "line " << e.mark.line + 1 << ", column " << e.mark.column + 1 << ": " << e.msg;
    throw ParseError(msg.str());
  }

  Ctx c;
  check_keys(root, "", {"model", "scenario"}, c);
  LoadedConfig out;

  const YAML::Node m = need(root, "model", "", c);
  check_keys(m, "model", {"gravity", "end_effector", "structures"}, c);
  Vec3 gravity{0.0, -9.81, 0.0};
  if (m && m["gravity"]) gravity = vec(m["gravity"], 3, "model.gravity", c);

  const YAML::Node ee = need(m, "end_effector", "model", c);
  check_keys(ee, "model.end_effector", {"angle", "offset", "after_prismatic"}, c);
  WrenchTransform ee_attach = WrenchTransform::identity();
  if (ee) {
    const double ang = num_or(ee, "angle", 0.0, "model.end_effector", c);
    Vec3 off = Vec3::Zero();
    if (ee["offset"]) off = vec(ee["offset"], 2, "model.end_effector.offset", c);
    ee_attach = WrenchTransform::rot_z(ang, off);
  }
  out.model.ee_attach = ee_attach;
  out.model.ee_after_prismatic =
      flag_or(ee, "after_prismatic", false, "model.end_effector", c);

  const YAML::Node sts = need(m, "structures", "model", c);
  if (sts && sts.IsSequence() && sts.size() >= 1) {
    for (size_t j = 0; j < sts.size(); ++j) {
      StructureGains g;
      out.model.structures.push_back(
          structure(sts[j], gravity, "model.structures[" + std::to_string(j) + "]", c, g));
      out.gains.structures.push_back(g);
    }
  } else if (sts) {
    c.fail("model.structures", "expected a non-empty sequence");
  }

  out.scenario = scenario(need(root, "scenario", "", c), "scenario", c);

  if (c.errs.empty()) {
    try {
      out.model.validate();
      out.gains.validate(out.model);
    } catch (const ModelError& e) {
      c.errs.push_back(std::string("model: ") + e.what());
    }
  }
  if (!c.errs.empty()) {
    std::ostringstream msg;
    for (size_t i = 0; i < c.errs.size(); ++i) msg << (i ? "\n" : "") << c.errs[i];
    throw ValidationError(msg.str());
  }
  return out;
}

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string write_config(const LoadedConfig& c) {
  std::ostringstream os;
  os << "model:\n";
  // gravity is shared across bodies; take it from the first one
  const Vec3 g = c.model.structures.empty()
                     ? Vec3{0.0, -9.81, 0.0}
                     : c.model.structures[0].body_base_link.gravity_world;
  os << "  gravity: " << fmt_vec(g, 3) << "\n";
  os << "  end_effector: {angle: " << fmt(attach_angle(c.model.ee_attach)) << ", offset: "
     << fmt_vec(c.model.ee_attach.offset, 2) << ", after_prismatic: "
     << (c.model.ee_after_prismatic ? "true" : "false") << "}\n";
  os << "  structures:\n";
  for (size_t j = 0; j < c.model.structures.size(); ++j) {
    const Structure& s = c.model.structures[j];
    const StructureGains& sg = c.gains.structures[j];
    os << "    - revolute:\n"
       << "        link_base: " << fmt(s.geom.link_base) << "\n"
       << "        link_distal: " << fmt(s.geom.link_distal) << "\n"
       << "        cyl_base_len: " << fmt(s.geom.cyl_base_len) << "\n"
       << "        piston_len: " << fmt(s.geom.piston_len) << "\n"
       << "        stroke: " << fmt(s.geom.stroke) << "\n"
       << "        attach: {angle: " << fmt(attach_angle(s.geom.base_attach))
       << ", offset: " << fmt_vec(s.geom.base_attach.offset, 2) << "}\n";
    os << "      bodies:\n";
    write_body(os, "        ", "base_link", s.body_base_link);
    write_body(os, "        ", "distal_link", s.body_distal_link);
    write_body(os, "        ", "cyl_case", s.body_cyl_case);
    write_body(os, "        ", "piston", s.body_piston);
    write_hydraulics(os, "      ", s.actuator);
    write_friction(os, "      ", s.friction);
    os << "      gains: {lambda: " << fmt(sg.lambda) << ", lambda_t: " << fmt(sg.lambda_t)
       << ", k_x: " << fmt(sg.k_x) << ", k_f: " << fmt(sg.k_f) << ", k_xt: " << fmt(sg.k_xt)
       << ", k_ft: " << fmt(sg.k_ft) << ", k_a: " << fmt(sg.k_a(0, 0)) << "}\n";
    if (s.prismatic) {
      const PrismaticSegment& p = *s.prismatic;
      os << "      prismatic:\n"
         << "        attach: {angle: " << fmt(attach_angle(p.attach)) << ", offset: "
         << fmt_vec(p.attach.offset, 2) << "}\n"
         << "        base_len: " << fmt(p.base_len) << "\n"
         << "        load_offset: " << fmt_vec(p.load_attach.offset, 2) << "\n"
         << "        stroke: " << fmt(p.stroke) << "\n";
      os << "        bodies:\n";
      write_body(os, "          ", "case", p.body_case);
      write_body(os, "          ", "piston", p.body_piston);
      write_body(os, "          ", "load", p.body_load);
      write_hydraulics(os, "        ", p.actuator);
      write_friction(os, "        ", p.friction);
    }
  }
  os << "scenario:\n  points:\n";
  for (const Vec3& p : c.scenario.points) os << "    - " << fmt_vec(p, 2) << "\n";
  os << "  leg_duration: " << fmt(c.scenario.leg_duration) << "\n"
     << "  loops: " << c.scenario.loops << "\n"
     << "  hold_time: " << fmt(c.scenario.hold_time) << "\n"
     << "  step: " << fmt(c.scenario.step) << "\n"
     << "  substeps: " << c.scenario.substeps << "\n"
     << "  elbow_up: " << (c.scenario.elbow_up ? "true" : "false") << "\n";
  if (!c.scenario.tool_wrench.head<3>().isZero(0.0))
    os << "  tool_force: " << fmt_vec(c.scenario.tool_wrench.head<3>(), 3) << "\n";
  if (!c.scenario.tool_wrench.tail<3>().isZero(0.0))
    os << "  tool_moment: " << fmt_vec(c.scenario.tool_wrench.tail<3>(), 3) << "\n";
  return os.str();
}

StateFile load_state_file(const std::string& path, size_t n_structures) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open state file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  YAML::Node root;
  try {
    root = YAML::Load(buf.str());
  } catch (const YAML::ParserException& e) {
    std::ostringstream msg;
    msg << "line " << e.mark.line + 1 << ", column " << e.mark.column + 1 << ": " << e.msg;
    throw ParseError(msg.str());
  }
  Ctx c;
  check_keys(root, "", {"joints", "tool_force", "tool_moment"}, c);
  StateFile s;
  const YAML::Node js = need(root, "joints", "", c);
  if (js && js.IsSequence() && js.size() == n_structures) {
    for (size_t j = 0; j < js.size(); ++j) {
      const std::string p = "joints[" + std::to_string(j) + "]";
      check_keys(js[j], p, {"q", "dq", "ddq", "xt", "dxt", "ddxt"}, c);
      JointState st;
      JointAccel ac;
      st.q = num(need(js[j], "q", p, c), p + ".q", c);
      st.dq = num_or(js[j], "dq", 0.0, p, c);
      st.xt = num_or(js[j], "xt", 0.0, p, c);
      st.dxt = num_or(js[j], "dxt", 0.0, p, c);
      ac.ddq = num_or(js[j], "ddq", 0.0, p, c);
      ac.ddxt = num_or(js[j], "ddxt", 0.0, p, c);
      s.joints.push_back(st);
      s.accels.push_back(ac);
    }
  } else if (js) {
    c.fail("joints", "expected one entry per structure (" + std::to_string(n_structures) + ")");
  }
  if (root["tool_force"]) s.tool_wrench.head<3>() = vec(root["tool_force"], 3, "tool_force", c);
  if (root["tool_moment"]) s.tool_wrench.tail<3>() = vec(root["tool_moment"], 3, "tool_moment", c);
  if (!c.errs.empty()) {
    std::ostringstream msg;
    for (size_t i = 0; i < c.errs.size(); ++i) msg << (i ? "\n" : "") << c.errs[i];
    throw ValidationError(msg.str());
  }
  return s;
}

}  // namespace vdc
