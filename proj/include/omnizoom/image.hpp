#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <numbers>

#include "omnizoom/error.hpp"
#include "omnizoom/geometry.hpp"

namespace omnizoom {

using Index = Eigen::Index;

enum class AspectPolicy {
  equirect,  // width must be 2 * height
  any,
};

/// Equirectangular image: H x W x C samples, row 0 is the northernmost row.
/// Stored as an H x (W * C) row-major array with interleaved channels.
template <typename Scalar>
class BasicErpImage {
 public:
  using Samples = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  BasicErpImage() = default;

  BasicErpImage(Index height, Index width, Index channels, AspectPolicy policy = AspectPolicy::equirect)
      : height_(height), width_(width), channels_(channels) {
    check_dims(policy);
    samples_ = Samples::Zero(height, width * channels);
  }

  BasicErpImage(Index height, Index width, Index channels, Scalar fill,
                AspectPolicy policy = AspectPolicy::equirect)
      : BasicErpImage(height, width, channels, policy) {
    samples_.setConstant(fill);
  }

  Index height() const { return height_; }
  Index width() const { return width_; }
  Index channels() const { return channels_; }
  bool empty() const { return height_ == 0; }

  Scalar& operator()(Index row, Index col, Index ch) { return samples_(row, col * channels_ + ch); }
  Scalar operator()(Index row, Index col, Index ch) const { return samples_(row, col * channels_ + ch); }

  Scalar* pixel(Index row, Index col) { return samples_.data() + (row * width_ + col) * channels_; }
  const Scalar* pixel(Index row, Index col) const {
    return samples_.data() + (row * width_ + col) * channels_;
  }

  Samples& samples() { return samples_; }
  const Samples& samples() const { return samples_; }

  bool same_shape(const BasicErpImage& other) const {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }

  friend bool operator==(const BasicErpImage& a, const BasicErpImage& b) {
    return a.same_shape(b) && (a.samples_ == b.samples_).all();
  }

 private:
  void check_dims(AspectPolicy policy) const {
    if (height_ < 1 || width_ < 1 || channels_ < 1) {
      throw Error(ErrorCode::bad_dims, "image dimensions must be positive");
    }
    if (policy == AspectPolicy::equirect && width_ != 2 * height_) {
      throw Error(ErrorCode::bad_dims, "equirectangular image needs width == 2 * height");
    }
  }

  Index height_ = 0;
  Index width_ = 0;
  Index channels_ = 0;
  Samples samples_;
};

using ErpImage = BasicErpImage<double>;

/// Pixel-center longitude of column j on a grid of width w.
template <typename Scalar>
Scalar column_longitude(Index j, Index w) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  return 2 * pi * (Scalar(j) + Scalar(0.5)) / Scalar(w) - pi;
}

/// Pixel-center latitude of row i on a grid of height h.
template <typename Scalar>
Scalar row_latitude(Index i, Index h) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  return pi / 2 - pi * (Scalar(i) + Scalar(0.5)) / Scalar(h);
}

/// Fractional column coordinate (pixel centers at integers) of a longitude.
template <typename Scalar>
Scalar longitude_to_column(Scalar theta, Index w) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  return (theta + pi) * Scalar(w) / (2 * pi) - Scalar(0.5);
}

/// Fractional row coordinate (pixel centers at integers) of a latitude.
template <typename Scalar>
Scalar latitude_to_row(Scalar phi, Index h) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  return (pi / 2 - phi) * Scalar(h) / pi - Scalar(0.5);
}

inline Index wrap_index(Index j, Index n) {
  const Index r = j % n;
  return r < 0 ? r + n : r;
}

inline Index clamp_index(Index i, Index n) { return std::clamp<Index>(i, 0, n - 1); }

/// Per-pixel source coordinates: longitude and latitude planes, row-major.
template <typename Scalar>
class IndexMap {
 public:
  using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  IndexMap() = default;
  IndexMap(Index height, Index width)
      : theta_(Plane::Zero(height, width)), phi_(Plane::Zero(height, width)) {}

  Index height() const { return theta_.rows(); }
  Index width() const { return theta_.cols(); }

  SphericalCoord<Scalar> operator()(Index row, Index col) const {
    SphericalCoord<Scalar> c;
    c.theta = theta_(row, col);
    c.phi = phi_(row, col);
    return c;
  }

  void set(Index row, Index col, const SphericalCoord<Scalar>& c) {
    theta_(row, col) = c.theta;
    phi_(row, col) = c.phi;
  }

  const Plane& longitude() const { return theta_; }
  const Plane& latitude() const { return phi_; }

  friend bool operator==(const IndexMap& a, const IndexMap& b) {
    return a.height() == b.height() && a.width() == b.width() && (a.theta_ == b.theta_).all() &&
           (a.phi_ == b.phi_).all();
  }

 private:
  Plane theta_;
  Plane phi_;
};

using IndexMapd = IndexMap<double>;

}  // namespace omnizoom
