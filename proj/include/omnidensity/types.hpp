#pragma once
#include <Eigen/Core>
#include <cstdint>

namespace omni {

template <class S> using Vec2 = Eigen::Matrix<S, 2, 1>;
template <class S> using Vec3 = Eigen::Matrix<S, 3, 1>;
template <class S> using Mat3 = Eigen::Matrix<S, 3, 3>;

// Row-major planes so a raster row is contiguous in memory.
template <class T>
using Plane = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Planef = Plane<float>;
using Planed = Plane<double>;
using Maskb  = Plane<std::uint8_t>;

// Pixel (u, v) addresses the center of that pixel; u runs right, v runs down.
template <class S>
struct PixelCoord {
  S u;
  S v;
};

}  // namespace omni
