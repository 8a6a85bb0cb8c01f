#include "isodiam/region_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>


namespace isodiam {

using nlohmann::json;

namespace {

constexpr std::size_t kIndexedUnionThreshold = 32;

json vec_to_json(const Vec& v) {
  json arr = json::array();
  for (double x : v.values()) arr.push_back(x);
  return arr;
}

void put_plane(json& out, const Space& space, const Hyperplane& h) {
  out["normal"] = vec_to_json(h.normal);
  out["orientation"] = h.orientation;
  if (space.euclidean()) out["offset"] = h.offset;
}

const json& field(const json& node, const char* key, const std::string& where) {
  if (!node.is_object()) throw DocumentError(where, "expected an object");
  const auto it = node.find(key);
  if (it == node.end()) throw DocumentError(where, std::string("missing field \"") + key + "\"");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw DocumentError(where, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw DocumentError(where, "number must be finite");
  return x;
}

Vec vector_field(const Space& space, const json& node, const char* key, const std::string& where) {
  const std::string here = where + "/" + key;
  const json& arr = field(node, key, where);
  if (!arr.is_array()) throw DocumentError(here, "expected an array of numbers");
  if (static_cast<int>(arr.size()) != space.ambient_dim()) {
    throw DocumentError(here, "expected " + std::to_string(space.ambient_dim()) + " coordinates for " +
                                  space.describe() + ", got " + std::to_string(arr.size()));
  }
  Vec v(space.ambient_dim());
  for (int i = 0; i < v.size(); ++i) v[i] = number(arr[static_cast<std::size_t>(i)], here + "/" + std::to_string(i));
  return v;
}

Hyperplane plane_from(const Space& space, const json& node, const std::string& where) {
  const Vec normal = vector_field(space, node, "normal", where);
  const json& o = field(node, "orientation", where);
  if (!o.is_number_integer() || (o.get<int>() != 1 && o.get<int>() != -1)) {
    throw DocumentError(where + "/orientation", "orientation must be +1 or -1");
  }
  double offset = 0.0;
  if (node.contains("offset")) offset = number(node["offset"], where + "/offset");
  try {
    const Hyperplane h = make_hyperplane(space, normal, o.get<int>(), offset);
    // Keep already-normalized input bit-for-bit so save/load round-trips.
    if (std::abs(std::abs(form(space, normal, normal)) - 1.0) <= 1e-12) return Hyperplane{normal, offset, h.orientation};
    return h;
  } catch (const Error& e) {
    throw DocumentError(where + "/normal", e.what());
  }
}

std::vector<Region> children_from(const Space& space, const json& node, const std::string& where) {
  const json& arr = field(node, "children", where);
  if (!arr.is_array() || arr.empty()) throw DocumentError(where + "/children", "expected a nonempty array");
  std::vector<Region> kids;
  kids.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    kids.push_back(region_from_json(space, arr[i], where + "/children/" + std::to_string(i)));
  }
  return kids;
}

// Unions of many equal balls get the indexed representation.
Region make_union(const Space& space, std::vector<Region> kids) {
  if (kids.size() >= kIndexedUnionThreshold) {
    const bool equal_balls = std::all_of(kids.begin(), kids.end(), [&](const Region& r) {
      return r.kind() == Region::Kind::Ball && r.as_ball().radius == kids.front().as_ball().radius;
    });
    if (equal_balls) {
      std::vector<Point> centers;
      centers.reserve(kids.size());
      for (const Region& r : kids) centers.push_back(r.as_ball().center);
      return Region::ball_union(space, std::move(centers), kids.front().as_ball().radius);
    }
  }
  return Region::unite(std::move(kids));
}

}  // namespace

json region_to_json(const Space& space, const Region& region) {
  json out = json::object();
  out["kind"] = to_string(region.kind());
  switch (region.kind()) {
    case Region::Kind::Ball:
      out["center"] = vec_to_json(region.as_ball().center.coords());
      out["radius"] = region.as_ball().radius;
      break;
    case Region::Kind::HalfSpace: put_plane(out, space, region.hyperplane()); break;
    case Region::Kind::Union:
    case Region::Kind::Intersection: {
      json kids = json::array();
      for (const Region& c : region.children()) kids.push_back(region_to_json(space, c));
      out["children"] = std::move(kids);
      break;
    }
    case Region::Kind::Difference:
      out["a"] = region_to_json(space, region.children()[0]);
      out["b"] = region_to_json(space, region.children()[1]);
      break;
    case Region::Kind::Symmetrized:
      put_plane(out, space, region.hyperplane());
      out["inner"] = region_to_json(space, region.inner());
      break;
  }
  return out;
}

json document_to_json(const RegionDocument& doc) {
  json out = json::object();
  out["space"] = std::string(to_string(doc.space.curvature()));
  out["dim"] = doc.space.dim();
  out["region"] = region_to_json(doc.space, doc.region);
  return out;
}

Region region_from_json(const Space& space, const json& node, const std::string& where) {
  const json& kind_field = field(node, "kind", where);
  if (!kind_field.is_string()) throw DocumentError(where + "/kind", "expected a string");
  const std::string kind = kind_field.get<std::string>();

  if (kind == "ball") {
    const Vec c = vector_field(space, node, "center", where);
    const double r = number(field(node, "radius", where), where + "/radius");
    if (!(r > 0.0)) throw DocumentError(where + "/radius", "ball radius must be positive, got " + std::to_string(r));
    if (space.spherical() && !(r < std::numbers::pi)) {
      throw DocumentError(where + "/radius", "spherical ball radius must be below pi");
    }
    try {
      return Region::ball(Ball{Point::on(space, c), r});
    } catch (const Error& e) {
      throw DocumentError(where + "/center", e.what());
    }
  }
  if (kind == "halfspace") return Region::halfspace(plane_from(space, node, where));
  if (kind == "union") return make_union(space, children_from(space, node, where));
  if (kind == "intersection") return Region::intersect(children_from(space, node, where));
  if (kind == "difference") {
    return Region::difference(region_from_json(space, field(node, "a", where), where + "/a"),
                              region_from_json(space, field(node, "b", where), where + "/b"));
  }
  if (kind == "symmetrized") {
    const Hyperplane h = plane_from(space, node, where);
    return Region::symmetrized(h, region_from_json(space, field(node, "inner", where), where + "/inner"));
  }
  throw DocumentError(where + "/kind", "unknown region kind \"" + kind + "\"");
}

Space space_from_json(const json& doc, const std::string& where) {
  const json& name = field(doc, "space", where);
  if (!name.is_string()) throw DocumentError(where + "/space", "expected a string");
  const json& dim = field(doc, "dim", where);
  if (!dim.is_number_integer()) throw DocumentError(where + "/dim", "expected an integer");
  try {
    return Space(curvature_from_string(name.get<std::string>()), dim.get<int>());
  } catch (const Error& e) {
    throw DocumentError(where, e.what());
  }
}

RegionDocument document_from_json(const json& doc, const std::optional<Space>& fallback) {
  if (!doc.is_object()) throw DocumentError("", "expected a JSON object");
  if (doc.contains("region")) {
    const Space space = doc.contains("space") || !fallback ? space_from_json(doc) : *fallback;
    if (fallback && !(space == *fallback)) {
      throw DocumentError("/space", "document space " + space.describe() + " conflicts with " + fallback->describe());
    }
    return {space, region_from_json(space, doc["region"], "/region")};
  }
  if (!fallback) throw DocumentError("", "bare region node needs the space to be given separately");
  return {*fallback, region_from_json(*fallback, doc)};
}

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw DocumentError("", origin + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + e.what());
  }
}

RegionDocument load_region(const std::filesystem::path& path, const std::optional<Space>& fallback) {
  std::ifstream in(path);
  if (!in) throw DocumentError("", "cannot open region document " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return document_from_json(parse_json_text(buf.str(), path.string()), fallback);
}

CloudDocument cloud_from_json(const json& doc) {
  if (!doc.is_object()) throw DocumentError("", "expected a JSON object");
  CloudDocument out{space_from_json(doc), {}};
  const json& pts = field(doc, "points", "");
  if (!pts.is_array() || pts.empty()) throw DocumentError("/points", "expected a non-empty array of points");
  out.points.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::string here = "/points/" + std::to_string(i);
    const json& arr = pts[i];
    if (!arr.is_array() || static_cast<int>(arr.size()) != out.space.ambient_dim()) {
      throw DocumentError(here, "expected " + std::to_string(out.space.ambient_dim()) + " coordinates for " +
                                    out.space.describe());
    }
    Vec c(out.space.ambient_dim());
    for (int k = 0; k < c.size(); ++k) c[k] = number(arr[static_cast<std::size_t>(k)], here + "/" + std::to_string(k));
    try {
      out.points.push_back(Point::on(out.space, c));
    } catch (const Error& e) {
      throw DocumentError(here, e.what());
    }
  }
  return out;
}

json cloud_to_json(const CloudDocument& doc) {
  json out{{"space", std::string(to_string(doc.space.curvature()))}, {"dim", doc.space.dim()}};
  json pts = json::array();
  for (const Point& p : doc.points) pts.push_back(vec_to_json(p.coords()));
  out["points"] = std::move(pts);
  return out;
}

CloudDocument load_cloud(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DocumentError("", "cannot open cloud document " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return cloud_from_json(parse_json_text(buf.str(), path.string()));
}

void save_region(const std::filesystem::path& path, const RegionDocument& doc) {
  write_file_atomically(path, document_to_json(doc).dump(2) + "\n");
}

std::uint64_t region_digest(const Space& space, const Region& region) {
  const std::string text = document_to_json({space, region}).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_file_atomically(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace isodiam
