#pragma once

// JSON documents for regions.
//
//   {"space": "sphere" | "hyperbolic" | "euclidean", "dim": n, "region": NODE}
//
//   NODE := {"kind": "ball", "center": [...], "radius": r}
//         | {"kind": "halfspace", "normal": [...], "orientation": +-1, "offset": t?}
//         | {"kind": "union" | "intersection", "children": [NODE, ...]}
//         | {"kind": "difference", "a": NODE, "b": NODE}
//         | {"kind": "symmetrized", "normal": [...], "orientation": +-1, "offset": t?, "inner": NODE}
//
// A bare NODE is accepted when the space is supplied by the caller. Errors are
// reported as DocumentError with a JSON pointer to the offending element.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "isodiam/geometry.hpp"
#include "isodiam/region.hpp"

namespace isodiam {

struct RegionDocument {
  Space space;
  Region region;
};

nlohmann::json region_to_json(const Space& space, const Region& region);
nlohmann::json document_to_json(const RegionDocument& doc);

Region region_from_json(const Space& space, const nlohmann::json& node, const std::string& where = "");
RegionDocument document_from_json(const nlohmann::json& doc, const std::optional<Space>& fallback = std::nullopt);

/// Parses JSON text; syntax errors carry line and column.
nlohmann::json parse_json_text(const std::string& text, const std::string& origin);

RegionDocument load_region(const std::filesystem::path& path, const std::optional<Space>& fallback = std::nullopt);
void save_region(const std::filesystem::path& path, const RegionDocument& doc);

/// Point cloud documents: {"space": name, "dim": n, "points": [[...], ...]}.
struct CloudDocument {
  Space space;
  std::vector<Point> points;
};

CloudDocument cloud_from_json(const nlohmann::json& doc);
nlohmann::json cloud_to_json(const CloudDocument& doc);
CloudDocument load_cloud(const std::filesystem::path& path);

/// Space from {"space": name, "dim": n}.
Space space_from_json(const nlohmann::json& doc, const std::string& where = "");

/// FNV-1a of the compact document serialization.
std::uint64_t region_digest(const Space& space, const Region& region);

/// Writes `text` to a sibling temporary and renames it over `path`.
void write_file_atomically(const std::filesystem::path& path, const std::string& text);

}  // namespace isodiam
