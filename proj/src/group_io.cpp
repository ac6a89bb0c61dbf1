#include "schottky/group_io.hpp"

#include <fstream>

namespace schottky {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::InvalidInput, what); }

const json& field(const json& obj, const char* name) {
  const auto it = obj.find(name);
  if (it == obj.end()) bad(std::string("missing field \"") + name + "\"");
  return *it;
}

double real_from_json(const json& j) {
  if (!j.is_number()) bad("expected a number, got " + j.dump());
  return j.get<double>();
}

bool is_infinity_token(const json& j) {
  if (!j.is_string()) return false;
  const auto s = j.get<std::string>();
  return s == "inf" || s == "infinity" || s == "Infinity";
}

MoebiusMap generator_from_json(const json& j) {
  if (!j.is_object()) bad("generator must be an object");
  if (j.contains("a")) {
    return MoebiusMap(complex_from_json(field(j, "a")), complex_from_json(field(j, "b")),
                      complex_from_json(field(j, "c")), complex_from_json(field(j, "d")));
  }
  if (j.contains("fixed_attracting")) {
    return from_fixed_data(point_from_json(field(j, "fixed_attracting")), point_from_json(field(j, "fixed_repelling")),
                           complex_from_json(field(j, "multiplier")));
  }
  bad("generator needs either a,b,c,d or fixed_attracting,fixed_repelling,multiplier");
}

}  // namespace

Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {real_from_json(j[0]), real_from_json(j[1])};
  bad("expected a complex number [re, im], got " + j.dump());
}

RiemannSpherePoint point_from_json(const json& j) {
  if (is_infinity_token(j)) return RiemannSpherePoint::infinity();
  return RiemannSpherePoint(complex_from_json(j));
}

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json point_to_json(const RiemannSpherePoint& p) {
  if (p.is_infinite()) return "inf";
  return complex_to_json(p.value());
}

GroupSpec parse_group_spec(const json& j) {
  if (!j.is_object()) bad("group file must hold a JSON object");
  GroupSpec spec;
  const json& g = field(j, "g");
  if (!g.is_number_integer() || g.get<int>() < 1) bad("\"g\" must be a positive integer");
  spec.g = g.get<int>();

  const json& gens = field(j, "generators");
  if (!gens.is_array() || static_cast<int>(gens.size()) != spec.g) bad("\"generators\" must list g generators");
  for (const auto& item : gens) spec.generators.push_back(generator_from_json(item));

  if (const auto it = j.find("circles"); it != j.end() && !it->is_null()) {
    if (!it->is_array() || static_cast<int>(it->size()) != 2 * spec.g) bad("\"circles\" must list 2g circles");
    std::vector<Circle> circles;
    for (const auto& item : *it) {
      if (!item.is_object()) bad("circle must be an object");
      Circle c;
      c.center = complex_from_json(field(item, "center"));
      c.radius = real_from_json(field(item, "radius"));
      circles.push_back(c);
    }
    spec.circles = std::move(circles);
  }

  if (const auto it = j.find("normalize"); it != j.end()) {
    if (!it->is_boolean()) bad("\"normalize\" must be a boolean");
    spec.normalize = it->get<bool>();
  }
  return spec;
}

GroupSpec read_group_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open group file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    bad("group file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_group_spec(j);
}

SchottkyGroup build_group(const GroupSpec& spec) {
  SchottkyGroup group(spec.generators, spec.circles);
  return spec.normalize ? group.normalized() : group;
}

SchottkyGroup read_group(const std::filesystem::path& path) { return build_group(read_group_spec(path)); }

json group_to_json(const SchottkyGroup& group) {
  json gens = json::array();
  for (const auto& m : group.generators()) {
    gens.push_back({{"a", complex_to_json(m.a())},
                    {"b", complex_to_json(m.b())},
                    {"c", complex_to_json(m.c())},
                    {"d", complex_to_json(m.d())}});
  }
  json circles = json::array();
  for (const auto& c : group.circles()) circles.push_back({{"center", complex_to_json(c.center)}, {"radius", c.radius}});
  return {{"g", group.genus()}, {"generators", gens}, {"circles", circles}, {"normalize", false}};
}

}  // namespace schottky
