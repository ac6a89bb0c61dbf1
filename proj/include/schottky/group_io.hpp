#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "schottky/schottky_group.hpp"

namespace schottky {

/// Parsed group file before the group is built. Circles are listed as C_1, C_-1, C_2, C_-2, ...
struct GroupSpec {
  int g = 0;
  std::vector<MoebiusMap> generators;
  std::optional<std::vector<Circle>> circles;
  bool normalize = false;
};

/// [re, im], a bare number, or "inf" (points only).
Complex complex_from_json(const nlohmann::json& j);
RiemannSpherePoint point_from_json(const nlohmann::json& j);
nlohmann::json complex_to_json(Complex z);
nlohmann::json point_to_json(const RiemannSpherePoint& p);

/// Throws InvalidInput on malformed files, and the usual construction errors on bad generators.
GroupSpec parse_group_spec(const nlohmann::json& j);
GroupSpec read_group_spec(const std::filesystem::path& path);

/// Builds the group (and normalizes it when requested).
SchottkyGroup build_group(const GroupSpec& spec);
SchottkyGroup read_group(const std::filesystem::path& path);

/// Round-trippable description: matrix generators plus the circles in use.
nlohmann::json group_to_json(const SchottkyGroup& group);

}  // namespace schottky
