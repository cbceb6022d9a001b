#include "excite/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "excite/error.hpp"

namespace excite {

using nlohmann::json;

namespace {

json vec3(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Eigen::Vector3d vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw FormatError(std::string("robot model: '") + what + "' must be a 3-vector");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json to_json(const RobotModel& m) {
  json joints = json::array();
  for (int i = 0; i < m.joint_count(); ++i) {
    const auto& js = m.joints[i];
    json entry = {
        {"name", js.name},
        {"a", js.a},
        {"alpha", js.alpha},
        {"d", js.d},
        {"theta_offset", js.theta_offset},
        {"q_min", js.q_min},
        {"q_max", js.q_max},
        {"qd_max", js.qd_max},
        {"qdd_max", js.qdd_max},
        {"capsule", {{"p0", vec3(js.capsule.p0)}, {"p1", vec3(js.capsule.p1)},
                     {"radius", js.capsule.radius}}},
    };
    if (m.truth.vector().size() == m.joint_count() * kParamsPerLink) {
      const LinkInertial l = m.truth.link(i);
      entry["inertial"] = {{"mass", l.mass},
                           {"first_moment", vec3(l.first_moment)},
                           {"inertia", l.inertia},
                           {"viscous", l.viscous},
                           {"coulomb", l.coulomb}};
    }
    joints.push_back(std::move(entry));
  }
  json halfspaces = json::array();
  for (const auto& h : m.constraints.halfspaces) {
    halfspaces.push_back({{"normal", vec3(h.normal)}, {"offset", h.offset}, {"first_link", h.first_link}});
  }
  json exempt = json::array();
  for (const auto& [a, b] : m.constraints.exempt_pairs) exempt.push_back({a, b});
  return {
      {"format", "excite-robot-model"},
      {"version", kModelFormatVersion},
      {"name", m.name},
      {"synthetic_ground_truth", m.synthetic_ground_truth},
      {"gravity", vec3(m.gravity)},
      {"joints", joints},
      {"constraints",
       {{"halfspaces", halfspaces},
        {"collision_margin", m.constraints.collision_margin},
        {"exempt_pairs", exempt}}},
  };
}

RobotModel from_json(const json& doc) {
  if (doc.value("format", "") != "excite-robot-model") {
    throw FormatError("robot model: missing or wrong 'format' tag");
  }
  const int version = doc.value("version", -1);
  if (version != kModelFormatVersion) {
    throw FormatError("robot model: unsupported version " + std::to_string(version));
  }
  RobotModel m;
  m.name = doc.value("name", "");
  m.synthetic_ground_truth = doc.value("synthetic_ground_truth", true);
  m.gravity = vec3(doc.at("gravity"), "gravity");
  std::vector<LinkInertial> links;
  bool has_inertial = true;
  for (const auto& j : doc.at("joints")) {
    JointSpec js;
    js.name = j.value("name", "");
    js.a = j.at("a").get<double>();
    js.alpha = j.at("alpha").get<double>();
    js.d = j.at("d").get<double>();
    js.theta_offset = j.value("theta_offset", 0.0);
    js.q_min = j.at("q_min").get<double>();
    js.q_max = j.at("q_max").get<double>();
    js.qd_max = j.at("qd_max").get<double>();
    js.qdd_max = j.at("qdd_max").get<double>();
    const auto& c = j.at("capsule");
    js.capsule.p0 = vec3(c.at("p0"), "capsule.p0");
    js.capsule.p1 = vec3(c.at("p1"), "capsule.p1");
    js.capsule.radius = c.at("radius").get<double>();
    m.joints.push_back(js);
    if (j.contains("inertial")) {
      const auto& in = j.at("inertial");
      LinkInertial l;
      l.mass = in.at("mass").get<double>();
      l.first_moment = vec3(in.at("first_moment"), "first_moment");
      const auto inertia = in.at("inertia");
      if (!inertia.is_array() || inertia.size() != 6) {
        throw FormatError("robot model: 'inertia' must have 6 entries (xx, xy, xz, yy, yz, zz)");
      }
      for (int k = 0; k < 6; ++k) l.inertia[k] = inertia[k].get<double>();
      l.viscous = in.value("viscous", 0.0);
      l.coulomb = in.value("coulomb", 0.0);
      links.push_back(l);
    } else {
      has_inertial = false;
    }
  }
  if (has_inertial && !links.empty()) m.truth = InertialParams::from_links(links);
  if (doc.contains("constraints")) {
    const auto& c = doc.at("constraints");
    for (const auto& h : c.value("halfspaces", json::array())) {
      HalfSpace hs;
      hs.normal = vec3(h.at("normal"), "halfspace.normal");
      hs.offset = h.at("offset").get<double>();
      hs.first_link = h.value("first_link", 0);
      m.constraints.halfspaces.push_back(hs);
    }
    m.constraints.collision_margin = c.value("collision_margin", 0.01);
    for (const auto& p : c.value("exempt_pairs", json::array())) {
      m.constraints.exempt_pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    }
  }
  m.validate();
  return m;
}

}  // namespace

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

RobotModel model_from_json_text(const std::string& text) {
  try {
    return from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw FormatError(std::string("robot model: ") + e.what());
  }
}

std::string model_to_json_text(const RobotModel& model) { return to_json(model).dump(2) + "\n"; }

RobotModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open robot model file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return model_from_json_text(buffer.str());
}

void save_model(const RobotModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write robot model file: " + path.string());
  out << model_to_json_text(model);
}

std::string model_hash(const RobotModel& model) {
  const std::string canonical = to_json(model).dump();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical.data(), canonical.size())));
  return buf;
}

}  // namespace excite
