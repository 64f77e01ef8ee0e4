#pragma once

// Resampling of ERP images at arbitrary spherical locations.
//
// The spherical kernel interpolates along great circles. For a query q it
// takes four source pixels p0, p1 (upper row) and p3, p2 (lower row), finds
// p01 on arc p0->p1 and p23 on arc p2->p3 that share q's meridian, and
// interpolates F(p01), F(p23) and finally F(q) with Slerp weights. Above the
// first or below the last pixel row the missing row is the same extreme row
// seen across the pole, i.e. at longitude theta + pi.

#include <array>
#include <cmath>
#include <numbers>
#include <string_view>

#include "omnizoom/error.hpp"
#include "omnizoom/geometry.hpp"
#include "omnizoom/image.hpp"
#include "omnizoom/parallel.hpp"

namespace omnizoom {

enum class ResampleKernel { spherical, nearest, planar_bilinear, planar_bicubic };

constexpr std::string_view to_string(ResampleKernel k) {
  switch (k) {
    case ResampleKernel::spherical: return "spherical";
    case ResampleKernel::nearest: return "nearest";
    case ResampleKernel::planar_bilinear: return "bilinear";
    case ResampleKernel::planar_bicubic: return "bicubic";
  }
  return "spherical";
}

/// How Slerp coefficients are applied to sample values. `raw` uses
/// sin((1-t)a)/sin a and sin(ta)/sin a as-is; their sum exceeds 1 by
/// O(t(1-t)a^2), so `normalized` divides by that sum to keep constants fixed.
enum class SlerpWeighting { normalized, raw };

struct ResampleOptions {
  SlerpWeighting weighting = SlerpWeighting::normalized;
  int threads = 0;
};

/// Arcs shorter than this use the linear limit (1 - t, t).
inline constexpr double kDegenerateAngle = 1e-7;
inline constexpr double kArcTolerance = 1e-9;

/// Angle between two unit vectors, accurate for both tiny and near-pi angles.
template <typename Scalar>
Scalar angle_between(const SpherePoint<Scalar>& a, const SpherePoint<Scalar>& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

template <typename Scalar>
SpherePoint<Scalar> slerp(const SpherePoint<Scalar>& a, const SpherePoint<Scalar>& b, Scalar t) {
  if (!(t >= 0 && t <= 1)) throw Error(ErrorCode::invalid_argument, "slerp parameter outside [0, 1]");
  const Scalar beta = angle_between(a, b);
  const Scalar eps = Scalar(kDegenerateAngle);
  if (beta < eps || beta > std::numbers::pi_v<Scalar> - eps) {
    throw Error(ErrorCode::degenerate_arc, "slerp endpoints too close or antipodal");
  }
  const Scalar s = std::sin(beta);
  return std::sin((1 - t) * beta) / s * a + std::sin(t * beta) / s * b;
}

template <typename Scalar>
struct ArcWeights {
  Scalar first;
  Scalar second;
};

template <typename Scalar>
ArcWeights<Scalar> slerp_weights(Scalar angle, Scalar t, SlerpWeighting weighting) {
  if (angle < Scalar(kDegenerateAngle)) return {1 - t, t};
  const Scalar s = std::sin(angle);
  ArcWeights<Scalar> w{std::sin((1 - t) * angle) / s, std::sin(t * angle) / s};
  if (weighting == SlerpWeighting::normalized) {
    const Scalar sum = w.first + w.second;
    w.first /= sum;
    w.second /= sum;
  }
  return w;
}

template <typename Scalar>
struct MeridianCrossing {
  SpherePoint<Scalar> point;
  Scalar t;
};

namespace detail {

enum class CrossStatus { ok, no_crossing };

/// Intersection of the minor arc a->b with the meridian plane of theta.
/// `arc` is angle_between(a, b). Does not reject short arcs.
template <typename Scalar>
CrossStatus cross_meridian(const SpherePoint<Scalar>& a, const SpherePoint<Scalar>& b, Scalar theta,
                           Scalar arc, MeridianCrossing<Scalar>& out) {
  const SpherePoint<Scalar> n = a.cross(b);
  const SpherePoint<Scalar> m(-std::sin(theta), std::cos(theta), 0);
  SpherePoint<Scalar> d = n.cross(m);
  const Scalar len = d.norm();
  if (!(len > 0)) return CrossStatus::no_crossing;
  d /= len;
  if (d.dot(a + b) < 0) d = -d;

  const Scalar tol = Scalar(kArcTolerance);
  for (int attempt = 0; attempt < 2; ++attempt) {
    const Scalar to_d = angle_between(a, d);
    const Scalar from_d = angle_between(d, b);
    if (std::abs(to_d + from_d - arc) <= tol) {
      out.point = d;
      out.t = arc > 0 ? std::clamp(to_d / arc, Scalar(0), Scalar(1)) : Scalar(0);
      return CrossStatus::ok;
    }
    d = -d;
  }
  return CrossStatus::no_crossing;
}

}  // namespace detail

/// Point on the minor arc pA->pB with longitude theta_q (closed form via the
/// intersection of the arc's great circle with the meridian plane) and its
/// arc parameter t = angle(pA, p) / angle(pA, pB).
template <typename Scalar>
MeridianCrossing<Scalar> meridian_cross(const SpherePoint<Scalar>& a, const SpherePoint<Scalar>& b,
                                        Scalar theta_q) {
  const Scalar arc = angle_between(a, b);
  const Scalar eps = Scalar(kDegenerateAngle);
  if (arc < eps || arc > std::numbers::pi_v<Scalar> - eps) {
    throw Error(ErrorCode::degenerate_arc, "arc endpoints too close or antipodal");
  }
  MeridianCrossing<Scalar> out;
  if (detail::cross_meridian(a, b, theta_q, arc, out) != detail::CrossStatus::ok) {
    throw Error(ErrorCode::no_crossing, "arc does not cross the requested meridian");
  }
  return out;
}

/// Source-grid trigonometry tables for fast corner lookup.
template <typename Scalar>
class SourceGrid {
 public:
  SourceGrid(Index height, Index width) : height_(height), width_(width) {
    if (height < 2 || width < 4) throw Error(ErrorCode::bad_dims, "source grid needs h >= 2 and w >= 4");
    row_cos_.resize(height);
    row_sin_.resize(height);
    col_cos_.resize(width);
    col_sin_.resize(width);
    for (Index i = 0; i < height; ++i) {
      const Scalar phi = row_latitude<Scalar>(i, height);
      row_cos_[i] = std::cos(phi);
      row_sin_[i] = std::sin(phi);
    }
    for (Index j = 0; j < width; ++j) {
      const Scalar theta = column_longitude<Scalar>(j, width);
      col_cos_[j] = std::cos(theta);
      col_sin_[j] = std::sin(theta);
    }
  }

  Index height() const { return height_; }
  Index width() const { return width_; }

  SpherePoint<Scalar> point(Index row, Index col) const {
    return {row_cos_[row] * col_cos_[col], row_cos_[row] * col_sin_[col], row_sin_[row]};
  }

  /// Columns whose pixel-center longitudes bracket theta (wrapping).
  std::array<Index, 2> bracket_columns(Scalar theta) const {
    const Index j0 = static_cast<Index>(std::floor(longitude_to_column(theta, width_)));
    return {wrap_index(j0, width_), wrap_index(j0 + 1, width_)};
  }

 private:
  Index height_;
  Index width_;
  Eigen::Array<Scalar, Eigen::Dynamic, 1> row_cos_, row_sin_, col_cos_, col_sin_;
};

/// Four-corner neighborhood of a query point and its interpolation weights.
/// Corners: p0, p1 on the upper row, p2, p3 on the lower row, with
/// theta0 = theta3 and theta1 = theta2 (up to the +pi shift of a row
/// continued across a pole) and phi0 = phi1, phi2 = phi3.
template <typename Scalar>
struct ResampleStencil {
  std::array<Index, 2> corner_rows{};  // upper (p0, p1), lower (p2, p3)
  std::array<Index, 4> corner_cols{};  // per corner p0..p3
  std::array<SpherePoint<Scalar>, 4> corners;
  SpherePoint<Scalar> p01;
  SpherePoint<Scalar> p23;
  Scalar alpha01{0};
  Scalar alpha23{0};
  Scalar omega{0};
  Scalar t01{0};
  Scalar t23{0};
  Scalar tq{0};
};

namespace detail {

template <typename Scalar>
void cross_or_clamp(const SpherePoint<Scalar>& a, const SpherePoint<Scalar>& b, Scalar theta, Scalar arc,
                    SpherePoint<Scalar>& point, Scalar& t) {
  MeridianCrossing<Scalar> c;
  if (cross_meridian(a, b, theta, arc, c) == CrossStatus::ok) {
    point = c.point;
    t = c.t;
    return;
  }
  // Only reachable through rounding at a cell border; fall back to the
  // longitude fraction along the arc.
  const Scalar span = normalize_longitude(sp_inv(b).theta - sp_inv(a).theta);
  const Scalar part = normalize_longitude(theta - sp_inv(a).theta);
  t = span != 0 ? std::clamp(part / span, Scalar(0), Scalar(1)) : Scalar(0);
  point = (arc < Scalar(kDegenerateAngle)) ? SpherePoint<Scalar>(((1 - t) * a + t * b).normalized())
                                           : slerp(a, b, t);
}

}  // namespace detail

template <typename Scalar>
ResampleStencil<Scalar> make_stencil(const SourceGrid<Scalar>& grid, const SphericalCoord<Scalar>& q) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const Index h = grid.height();
  const Index i0 = static_cast<Index>(std::floor(latitude_to_row(q.phi, h)));

  Index upper_row, lower_row;
  Scalar upper_theta = q.theta;
  Scalar lower_theta = q.theta;
  if (i0 < 0) {
    upper_row = lower_row = 0;
    upper_theta = normalize_longitude(q.theta + pi);
  } else if (i0 >= h - 1) {
    upper_row = lower_row = h - 1;
    lower_theta = normalize_longitude(q.theta + pi);
  } else {
    upper_row = i0;
    lower_row = i0 + 1;
  }

  ResampleStencil<Scalar> s;
  s.corner_rows = {upper_row, lower_row};
  const auto upper_cols = grid.bracket_columns(upper_theta);
  const auto lower_cols = grid.bracket_columns(lower_theta);
  s.corner_cols = {upper_cols[0], upper_cols[1], lower_cols[1], lower_cols[0]};
  s.corners = {grid.point(upper_row, upper_cols[0]), grid.point(upper_row, upper_cols[1]),
               grid.point(lower_row, lower_cols[1]), grid.point(lower_row, lower_cols[0])};

  s.alpha01 = angle_between(s.corners[0], s.corners[1]);
  s.alpha23 = angle_between(s.corners[2], s.corners[3]);
  detail::cross_or_clamp(s.corners[0], s.corners[1], upper_theta, s.alpha01, s.p01, s.t01);
  detail::cross_or_clamp(s.corners[2], s.corners[3], lower_theta, s.alpha23, s.p23, s.t23);

  // p01, p23 and q share a meridian, so q's parameter is a signed angle on
  // that great circle.
  const SpherePoint<Scalar> qp = sp(q);
  const SpherePoint<Scalar> normal = s.p01.cross(s.p23);
  s.omega = std::atan2(normal.norm(), s.p01.dot(s.p23));
  Scalar tq;
  if (s.omega < Scalar(kDegenerateAngle)) {
    const SpherePoint<Scalar> chord = s.p23 - s.p01;
    const Scalar len2 = chord.squaredNorm();
    tq = len2 > 0 ? (qp - s.p01).dot(chord) / len2 : Scalar(0);
  } else {
    const SpherePoint<Scalar> axis = normal / normal.norm();
    tq = std::atan2(s.p01.cross(qp).dot(axis), s.p01.dot(qp)) / s.omega;
  }
  s.tq = std::clamp(tq, Scalar(0), Scalar(1));
  return s;
}

template <typename Scalar>
ResampleStencil<Scalar> make_stencil(Index height, Index width, const SphericalCoord<Scalar>& q) {
  return make_stencil(SourceGrid<Scalar>(height, width), q);
}

/// Per-corner weights (p0..p3) of the two-step Slerp interpolation.
template <typename Scalar>
std::array<Scalar, 4> stencil_weights(const ResampleStencil<Scalar>& s, SlerpWeighting weighting) {
  const auto upper = slerp_weights(s.alpha01, s.t01, weighting);
  const auto lower = slerp_weights(s.alpha23, s.t23, weighting);
  const auto vertical = slerp_weights(s.omega, s.tq, weighting);
  return {vertical.first * upper.first, vertical.first * upper.second, vertical.second * lower.first,
          vertical.second * lower.second};
}

namespace detail {

template <typename Scalar>
Scalar cubic_weight(Scalar x) {
  constexpr Scalar a = Scalar(-0.5);
  x = std::abs(x);
  if (x <= 1) return ((a + 2) * x - (a + 3)) * x * x + 1;
  if (x < 2) return ((a * x - 5 * a) * x + 8 * a) * x - 4 * a;
  return 0;
}

/// Keys cubic convolution weights (a = -0.5) for taps floor-1 .. floor+2.
template <typename Scalar>
std::array<Scalar, 4> cubic_weights(Scalar frac) {
  return {cubic_weight(1 + frac), cubic_weight(frac), cubic_weight(1 - frac), cubic_weight(2 - frac)};
}

template <typename Scalar>
Scalar clamp_unit(Scalar v) {
  return std::clamp(v, Scalar(0), Scalar(1));
}

template <typename Scalar>
void sample_spherical(const BasicErpImage<Scalar>& src, const SourceGrid<Scalar>& grid,
                      const SphericalCoord<Scalar>& q, SlerpWeighting weighting, Scalar* out) {
  const ResampleStencil<Scalar> s = make_stencil(grid, q);
  const auto w = stencil_weights(s, weighting);
  const Index channels = src.channels();
  const Scalar* c0 = src.pixel(s.corner_rows[0], s.corner_cols[0]);
  const Scalar* c1 = src.pixel(s.corner_rows[0], s.corner_cols[1]);
  const Scalar* c2 = src.pixel(s.corner_rows[1], s.corner_cols[2]);
  const Scalar* c3 = src.pixel(s.corner_rows[1], s.corner_cols[3]);
  for (Index c = 0; c < channels; ++c) {
    out[c] = clamp_unit(w[0] * c0[c] + w[1] * c1[c] + w[2] * c2[c] + w[3] * c3[c]);
  }
}

template <typename Scalar>
void sample_nearest(const BasicErpImage<Scalar>& src, Scalar row, Scalar col, Scalar* out) {
  const Index i = clamp_index(static_cast<Index>(std::floor(row + Scalar(0.5))), src.height());
  const Index j = wrap_index(static_cast<Index>(std::floor(col + Scalar(0.5))), src.width());
  const Scalar* p = src.pixel(i, j);
  for (Index c = 0; c < src.channels(); ++c) out[c] = clamp_unit(p[c]);
}

template <typename Scalar>
void sample_bilinear(const BasicErpImage<Scalar>& src, Scalar row, Scalar col, Scalar* out) {
  const Scalar r0 = std::floor(row);
  const Scalar c0 = std::floor(col);
  const Scalar fr = row - r0;
  const Scalar fc = col - c0;
  const Index i0 = clamp_index(static_cast<Index>(r0), src.height());
  const Index i1 = clamp_index(static_cast<Index>(r0) + 1, src.height());
  const Index j0 = wrap_index(static_cast<Index>(c0), src.width());
  const Index j1 = wrap_index(static_cast<Index>(c0) + 1, src.width());
  const Scalar* p00 = src.pixel(i0, j0);
  const Scalar* p01 = src.pixel(i0, j1);
  const Scalar* p10 = src.pixel(i1, j0);
  const Scalar* p11 = src.pixel(i1, j1);
  for (Index c = 0; c < src.channels(); ++c) {
    const Scalar top = (1 - fc) * p00[c] + fc * p01[c];
    const Scalar bottom = (1 - fc) * p10[c] + fc * p11[c];
    out[c] = clamp_unit((1 - fr) * top + fr * bottom);
  }
}

template <typename Scalar>
void sample_bicubic(const BasicErpImage<Scalar>& src, Scalar row, Scalar col, Scalar* out) {
  const Scalar r0 = std::floor(row);
  const Scalar c0 = std::floor(col);
  const auto wr = cubic_weights(row - r0);
  const auto wc = cubic_weights(col - c0);
  const Index base_r = static_cast<Index>(r0) - 1;
  const Index base_c = static_cast<Index>(c0) - 1;
  const Index channels = src.channels();
  for (Index c = 0; c < channels; ++c) out[c] = 0;
  for (int a = 0; a < 4; ++a) {
    const Index i = clamp_index(base_r + a, src.height());
    for (int b = 0; b < 4; ++b) {
      const Scalar w = wr[a] * wc[b];
      const Scalar* p = src.pixel(i, wrap_index(base_c + b, src.width()));
      for (Index c = 0; c < channels; ++c) out[c] += w * p[c];
    }
  }
  for (Index c = 0; c < channels; ++c) out[c] = clamp_unit(out[c]);
}

}  // namespace detail

/// Samples `src` at every coordinate of `y`. Planar kernels read Y as
/// fractional ERP pixel coordinates (longitude wraps, latitude clamps).
/// Output samples are clamped to [0, 1].
template <typename Scalar>
BasicErpImage<Scalar> resample(const BasicErpImage<Scalar>& src, const IndexMap<Scalar>& y,
                               ResampleKernel kernel, const ResampleOptions& options = {}) {
  if (src.empty()) throw Error(ErrorCode::bad_dims, "empty source image");
  if (y.height() < 1 || y.width() < 1) throw Error(ErrorCode::bad_dims, "empty index map");
  if (src.height() < 2 || src.width() < 4) throw Error(ErrorCode::bad_dims, "source needs h >= 2 and w >= 4");

  BasicErpImage<Scalar> out(y.height(), y.width(), src.channels(), AspectPolicy::any);
  const SourceGrid<Scalar> grid(src.height(), src.width());
  const Index sh = src.height();
  const Index sw = src.width();

  parallel_for_bands(y.height(), options.threads, [&](Index row_begin, Index row_end) {
    for (Index i = row_begin; i < row_end; ++i) {
      for (Index j = 0; j < y.width(); ++j) {
        const SphericalCoord<Scalar> q = y(i, j);
        Scalar* dst = out.pixel(i, j);
        if (kernel == ResampleKernel::spherical) {
          detail::sample_spherical(src, grid, q, options.weighting, dst);
          continue;
        }
        const Scalar row = latitude_to_row(q.phi, sh);
        const Scalar col = longitude_to_column(q.theta, sw);
        switch (kernel) {
          case ResampleKernel::nearest: detail::sample_nearest(src, row, col, dst); break;
          case ResampleKernel::planar_bilinear: detail::sample_bilinear(src, row, col, dst); break;
          case ResampleKernel::planar_bicubic: detail::sample_bicubic(src, row, col, dst); break;
          case ResampleKernel::spherical: break;
        }
      }
    }
  });
  return out;
}

}  // namespace omnizoom
