#pragma once
#include <stdexcept>
#include <string>

namespace omni {

enum class Err {
  zero_vector,
  at_projection_center,
  point_at_projection_center,
  invalid_rotation,
  dimension_mismatch,
  non_square_image,
  odd_dimensions,
  too_few_points,
  negative_count,
  length_mismatch,
  empty_input,
  degenerate_hull,
  schema_version_mismatch,
  malformed_record,
  unknown_group,
  missing_map,
  disk_behind_camera,
  near_singularity,
  near_projection_center,
  bad_argument,
  io_error,
};

inline const char* err_name(Err e) {
  switch (e) {
    case Err::zero_vector:                return "ZeroVector";
    case Err::at_projection_center:       return "AtProjectionCenter";
    case Err::point_at_projection_center: return "PointAtProjectionCenter";
    case Err::invalid_rotation:           return "InvalidRotation";
    case Err::dimension_mismatch:         return "DimensionMismatch";
    case Err::non_square_image:           return "NonSquareImage";
    case Err::odd_dimensions:             return "OddDimensions";
    case Err::too_few_points:             return "TooFewPoints";
    case Err::negative_count:             return "NegativeCount";
    case Err::length_mismatch:            return "LengthMismatch";
    case Err::empty_input:                return "EmptyInput";
    case Err::degenerate_hull:            return "DegenerateHull";
    case Err::schema_version_mismatch:    return "SchemaVersionMismatch";
    case Err::malformed_record:           return "MalformedRecord";
    case Err::unknown_group:              return "UnknownGroup";
    case Err::missing_map:                return "MissingMap";
    case Err::disk_behind_camera:         return "DiskBehindCamera";
    case Err::near_singularity:           return "NearSingularity";
    case Err::near_projection_center:     return "NearProjectionCenter";
    case Err::bad_argument:               return "BadArgument";
    case Err::io_error:                   return "IoError";
  }
  return "Unknown";
}

struct Error : std::runtime_error {
  Err code;
  Error(Err c, const std::string& msg)
      : std::runtime_error(std::string(err_name(c)) + ": " + msg), code(c) {}
};

[[noreturn]] inline void fail(Err c, const std::string& msg) { throw Error(c, msg); }

inline void require(bool ok, Err c, const std::string& msg) {
  if (!ok) fail(c, msg);
}

}  // namespace omni
