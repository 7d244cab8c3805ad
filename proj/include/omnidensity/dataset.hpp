#pragma once
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "omnidensity/density.hpp"
#include "omnidensity/geom.hpp"
#include "omnidensity/hull.hpp"
#include "omnidensity/image.hpp"

namespace omni {

struct UnitArea {
  Polygon corners;
  int id = 0;

  void validate() const;  // simple (non-self-intersecting) polygon, >= 3 vertices
};

// Rotation as roll/pitch/yaw sidecar values or an explicit matrix.
struct RotationSpec {
  bool has_matrix = false;
  Mat3<double> matrix = Mat3<double>::Identity();
  double roll = 0, pitch = 0, yaw = 0;

  Mat3<double> resolve() const {
    return has_matrix ? matrix : rotation_rpy(roll, pitch, yaw);
  }
};

struct CaptureInfo {
  std::string date;
  std::string trellis;
};

struct ImageRecord {
  std::string id;
  std::string source;
  RotationSpec rotation;
  ProjectionParams<double> projection;
  std::optional<UnitArea> unit_area;
  Annotations annotations;
  std::string split;  // "train" | "test"
  CaptureInfo capture;
};

struct Manifest {
  int schema_version = 1;
  std::vector<ImageRecord> records;

  double mean_count() const {
    if (records.empty()) return 0.0;
    double total = 0;
    for (const auto& r : records) total += static_cast<double>(r.annotations.size());
    return total / static_cast<double>(records.size());
  }
};

struct ValidationReport {
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

Manifest load_manifest(const std::string& path);
void save_manifest(const Manifest& m, const std::string& path);
std::string manifest_to_json(const Manifest& m);
Manifest manifest_from_json(const std::string& text);
ValidationReport validate_manifest(const Manifest& m);

// Partition by trellis id: records matching train_group train, the rest test.
std::pair<Manifest, Manifest> split_by_group(const Manifest& m, const std::string& train_group);

struct CropResult {
  Image raster;
  Maskb mask;
  Annotations anns;           // kept annotations, shifted into crop coordinates
  Polygon hull;               // in source coordinates
  Vec2<double> offset{0, 0};  // source pixel of the crop's (0, 0)
  ProjectionParams<double> source_params;
};

// Convex hull of the unit-area polygon united with the corners of every
// annotation bbox whose center lies inside the polygon; the crop is the hull's
// bounding rectangle with pixels outside the hull masked out. A bbox that
// straddles the polygon edge therefore survives in full.
CropResult crop_unit_area(const StereoImage& img, const UnitArea& area, const Annotations& anns);

}  // namespace omni
