#include "omnidensity/dataset.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "omnidensity/error.hpp"

namespace omni {

using json = nlohmann::ordered_json;

namespace {

bool segments_intersect(const Vec2<double>& a, const Vec2<double>& b, const Vec2<double>& c,
                        const Vec2<double>& d) {
  const double d1 = cross2(c, d, a);
  const double d2 = cross2(c, d, b);
  const double d3 = cross2(a, b, c);
  const double d4 = cross2(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  auto on = [](const Vec2<double>& p, const Vec2<double>& q, const Vec2<double>& r) {
    return cross2(p, q, r) == 0 && (r.x() - p.x()) * (r.x() - q.x()) <= 0 &&
           (r.y() - p.y()) * (r.y() - q.y()) <= 0;
  };
  return on(c, d, a) || on(c, d, b) || on(a, b, c) || on(a, b, d);
}

}  // namespace

void UnitArea::validate() const {
  require(corners.size() >= 3, Err::malformed_record, "unit area needs >= 3 corners");
  const size_t n = corners.size();
  for (size_t i = 0; i < n; ++i) {
    const auto& a0 = corners[i];
    const auto& a1 = corners[(i + 1) % n];
    require((a1 - a0).norm() > 0, Err::malformed_record, "unit area has a zero-length edge");
    for (size_t j = i + 1; j < n; ++j) {
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;  // shared vertex
      const auto& b0 = corners[j];
      const auto& b1 = corners[(j + 1) % n];
      require(!segments_intersect(a0, a1, b0, b1), Err::malformed_record,
              "unit area polygon self-intersects");
    }
  }
}

namespace {

json annotation_to_json(const Annotation& a) {
  return json::array({a.u_min, a.v_min, a.u_max, a.v_max});
}

Annotation annotation_from_json(const json& j, const std::string& id) {
  require(j.is_array() && j.size() == 4, Err::malformed_record, "bad bbox in record " + id);
  Annotation a;
  a.u_min = j[0].get<double>();
  a.v_min = j[1].get<double>();
  a.u_max = j[2].get<double>();
  a.v_max = j[3].get<double>();
  require(a.u_min < a.u_max && a.v_min < a.v_max, Err::malformed_record,
          "degenerate bbox in record " + id);
  a.center = Vec2<double>((a.u_min + a.u_max) / 2, (a.v_min + a.v_max) / 2);
  return a;
}

json record_to_json(const ImageRecord& r) {
  json j;
  j["id"] = r.id;
  j["source"] = r.source;
  if (r.rotation.has_matrix) {
    json m = json::array();
    for (int row = 0; row < 3; ++row)
      for (int col = 0; col < 3; ++col) m.push_back(r.rotation.matrix(row, col));
    j["rotation"] = json{{"matrix", m}};
  } else {
    j["rotation"] =
        json{{"roll", r.rotation.roll}, {"pitch", r.rotation.pitch}, {"yaw", r.rotation.yaw}};
  }
  j["projection"] = json{{"d", r.projection.d},
                         {"width", r.projection.width},
                         {"height", r.projection.height},
                         {"scale", r.projection.scale},
                         {"center_u", r.projection.center_u},
                         {"center_v", r.projection.center_v}};
  if (r.unit_area) {
    json corners = json::array();
    for (const auto& c : r.unit_area->corners) corners.push_back(json::array({c.x(), c.y()}));
    j["unit_area"] = json{{"id", r.unit_area->id}, {"corners", corners}};
  }
  json anns = json::array();
  for (const auto& a : r.annotations) anns.push_back(annotation_to_json(a));
  j["annotations"] = anns;
  j["split"] = r.split;
  j["capture"] = json{{"date", r.capture.date}, {"trellis", r.capture.trellis}};
  return j;
}

ImageRecord record_from_json(const json& j) {
  require(j.is_object() && j.contains("id") && j["id"].is_string(), Err::malformed_record,
          "record without id");
  ImageRecord r;
  r.id = j["id"].get<std::string>();
  const std::string& id = r.id;
  try {
    r.source = j.value("source", std::string{});
    if (j.contains("rotation")) {
      const json& rot = j["rotation"];
      if (rot.contains("matrix")) {
        const json& m = rot["matrix"];
        require(m.is_array() && m.size() == 9, Err::malformed_record,
                "rotation matrix must have 9 entries in record " + id);
        r.rotation.has_matrix = true;
        for (int row = 0; row < 3; ++row)
          for (int col = 0; col < 3; ++col)
            r.rotation.matrix(row, col) = m[static_cast<size_t>(3 * row + col)].get<double>();
      } else {
        r.rotation.roll = rot.value("roll", 0.0);
        r.rotation.pitch = rot.value("pitch", 0.0);
        r.rotation.yaw = rot.value("yaw", 0.0);
      }
    }
    const json& p = j.at("projection");
    r.projection.d = p.at("d").get<double>();
    r.projection.width = p.at("width").get<int>();
    r.projection.height = p.at("height").get<int>();
    r.projection.scale = p.at("scale").get<double>();
    r.projection.center_u = p.at("center_u").get<double>();
    r.projection.center_v = p.at("center_v").get<double>();
    r.projection.validate();
    if (j.contains("unit_area")) {
      UnitArea area;
      area.id = j["unit_area"].value("id", 0);
      for (const auto& c : j["unit_area"].at("corners")) {
        require(c.is_array() && c.size() == 2, Err::malformed_record,
                "bad unit area corner in record " + id);
        area.corners.emplace_back(c[0].get<double>(), c[1].get<double>());
      }
      area.validate();
      r.unit_area = std::move(area);
    }
    for (const auto& a : j.value("annotations", json::array()))
      r.annotations.push_back(annotation_from_json(a, id));
    r.split = j.at("split").get<std::string>();
    require(r.split == "train" || r.split == "test", Err::malformed_record,
            "split must be train or test in record " + id);
    if (j.contains("capture")) {
      r.capture.date = j["capture"].value("date", std::string{});
      r.capture.trellis = j["capture"].value("trellis", std::string{});
    }
  } catch (const json::exception& e) {
    fail(Err::malformed_record, "record " + id + ": " + e.what());
  }
  return r;
}

}  // namespace

std::string manifest_to_json(const Manifest& m) {
  json j;
  j["schema_version"] = m.schema_version;
  json images = json::array();
  std::size_t total = 0;
  for (const auto& r : m.records) {
    images.push_back(record_to_json(r));
    total += r.annotations.size();
  }
  j["images"] = std::move(images);
  j["stats"] = json{{"num_images", m.records.size()},
                    {"total_annotations", total},
                    {"mean_count", m.mean_count()}};
  return j.dump(2) + "\n";
}

Manifest manifest_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(Err::io_error, std::string("manifest is not valid JSON: ") + e.what());
  }
  require(j.contains("schema_version") && j["schema_version"].is_number_integer(),
          Err::schema_version_mismatch, "missing schema_version");
  const int version = j["schema_version"].get<int>();
  require(version == 1, Err::schema_version_mismatch,
          "unsupported schema_version " + std::to_string(version));
  Manifest m;
  m.schema_version = version;
  for (const auto& rec : j.value("images", json::array()))
    m.records.push_back(record_from_json(rec));
  return m;
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Err::io_error, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return manifest_from_json(buf.str());
}

void save_manifest(const Manifest& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), Err::io_error, "cannot open " + path + " for writing");
  out << manifest_to_json(m);
  require(out.good(), Err::io_error, "short write to " + path);
}

ValidationReport validate_manifest(const Manifest& m) {
  ValidationReport rep;
  std::set<std::string> ids;
  for (const auto& r : m.records) {
    if (!ids.insert(r.id).second) rep.problems.push_back("duplicate id: " + r.id);
    if (r.split != "train" && r.split != "test")
      rep.problems.push_back(r.id + ": split missing or invalid");
    const double w = r.projection.width;
    const double h = r.projection.height;
    for (const auto& a : r.annotations) {
      if (!(a.u_min < a.u_max && a.v_min < a.v_max)) {
        rep.problems.push_back(r.id + ": degenerate bbox");
        continue;
      }
      if (a.u_min < -0.5 || a.v_min < -0.5 || a.u_max > w - 0.5 || a.v_max > h - 0.5)
        rep.problems.push_back(r.id + ": bbox outside image bounds");
    }
    if (r.unit_area) {
      try {
        r.unit_area->validate();
      } catch (const Error& e) {
        rep.problems.push_back(r.id + ": " + e.what());
      }
    }
  }
  return rep;
}

std::pair<Manifest, Manifest> split_by_group(const Manifest& m,
                                             const std::string& train_group) {
  std::vector<std::string> missing;
  std::set<std::string> groups;
  for (const auto& r : m.records) {
    if (r.capture.trellis.empty())
      missing.push_back(r.id);
    else
      groups.insert(r.capture.trellis);
  }
  if (!missing.empty()) {
    std::string ids;
    for (const auto& id : missing) ids += (ids.empty() ? "" : ", ") + id;
    fail(Err::malformed_record, "records missing trellis id: " + ids);
  }
  require(groups.count(train_group) > 0, Err::unknown_group,
          "no record has trellis '" + train_group + "'");
  if (groups.size() == 1)
    std::cerr << "warning: single trellis group '" << train_group
              << "'; the test split is empty\n";

  Manifest train, test;
  train.schema_version = test.schema_version = m.schema_version;
  for (const auto& r : m.records)
    (r.capture.trellis == train_group ? train : test).records.push_back(r);
  return {std::move(train), std::move(test)};
}

CropResult crop_unit_area(const StereoImage& img, const UnitArea& area,
                          const Annotations& anns) {
  img.validate();
  area.validate();
  const int w = img.raster.width;
  const int h = img.raster.height;
  auto inside_raster = [&](double u, double v) {
    return u >= -0.5 && u <= w - 0.5 && v >= -0.5 && v <= h - 0.5;
  };
  for (const auto& c : area.corners)
    require(inside_raster(c.x(), c.y()), Err::bad_argument, "unit area leaves the raster");
  for (const auto& a : anns)
    require(inside_raster(a.u_min, a.v_min) && inside_raster(a.u_max, a.v_max),
            Err::bad_argument, "annotation bbox leaves the raster");

  Polygon pts = area.corners;
  Annotations kept;
  for (const auto& a : anns) {
    if (!point_in_polygon(a.center, area.corners)) continue;
    kept.push_back(a);
    pts.emplace_back(a.u_min, a.v_min);
    pts.emplace_back(a.u_min, a.v_max);
    pts.emplace_back(a.u_max, a.v_min);
    pts.emplace_back(a.u_max, a.v_max);
  }
  const Polygon hull = convex_hull(pts);

  Vec2<double> lo, hi;
  polygon_bounds(hull, lo, hi);
  const int x0 = std::max(0, static_cast<int>(std::floor(lo.x())));
  const int y0 = std::max(0, static_cast<int>(std::floor(lo.y())));
  const int x1 = std::min(w - 1, static_cast<int>(std::ceil(hi.x())));
  const int y1 = std::min(h - 1, static_cast<int>(std::ceil(hi.y())));

  CropResult out;
  out.hull = hull;
  out.offset = {double(x0), double(y0)};
  out.source_params = img.params;
  const int cw = x1 - x0 + 1;
  const int ch = y1 - y0 + 1;
  out.raster = Image(cw, ch, img.raster.channels());
  out.mask = Maskb::Zero(ch, cw);
  for (int y = 0; y < ch; ++y) {
    for (int x = 0; x < cw; ++x) {
      if (!point_in_polygon(Vec2<double>(x0 + x, y0 + y), hull)) continue;
      bool valid = true;
      if (img.mask) valid = (*img.mask)(y0 + y, x0 + x) != 0;
      if (!valid) continue;
      out.mask(y, x) = 1;
      for (int c = 0; c < img.raster.channels(); ++c)
        out.raster.at(x, y, c) = img.raster.at(x0 + x, y0 + y, c);
    }
  }
  for (Annotation a : kept) {
    a.u_min -= x0;
    a.u_max -= x0;
    a.v_min -= y0;
    a.v_max -= y0;
    a.center -= Vec2<double>(x0, y0);
    out.anns.push_back(a);
  }
  return out;
}

}  // namespace omni
