#pragma once
#include <optional>
#include <vector>

#include "omnidensity/error.hpp"
#include "omnidensity/geom.hpp"
#include "omnidensity/types.hpp"

namespace omni {

// Planar raster: one row-major plane per channel, samples in [0, 1].
struct Image {
  int width = 0;
  int height = 0;
  std::vector<Planef> planes;

  Image() = default;
  Image(int w, int h, int channels) : width(w), height(h) {
    require(w > 0 && h > 0, Err::bad_argument, "image dims must be positive");
    require(channels == 1 || channels == 3, Err::bad_argument,
            "channels must be 1 or 3");
    planes.assign(static_cast<size_t>(channels), Planef::Zero(h, w));
  }

  int channels() const { return static_cast<int>(planes.size()); }

  float& at(int x, int y, int c) { return planes[static_cast<size_t>(c)](y, x); }
  float at(int x, int y, int c) const { return planes[static_cast<size_t>(c)](y, x); }

  bool same_shape(const Image& o) const {
    return width == o.width && height == o.height && channels() == o.channels();
  }
};

// Stereographic raster plus the projection that produced it. The mask marks
// pixels whose sphere preimage was actually sampled (1) vs out-of-coverage (0).
struct StereoImage {
  Image raster;
  ProjectionParams<double> params;
  std::optional<Maskb> mask;

  void validate() const {
    params.validate();
    require(raster.width == params.width && raster.height == params.height,
            Err::dimension_mismatch, "raster does not match projection params");
    if (mask) {
      require(mask->cols() == raster.width && mask->rows() == raster.height,
              Err::dimension_mismatch, "mask does not match raster");
    }
  }
};

}  // namespace omni
