#pragma once

// Sphere <-> extended complex plane geometry and Mobius matrix algebra.
//
// Plane points are carried as homogeneous coordinates (u : v) in CP1 so the
// stereographic pole and the poles of f(z) = (az + b) / (cz + d) are ordinary
// values. The projection pole is (0, 0, 1); w = u / v = (x + iy) / (1 - z).

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <complex>
#include <numbers>

#include "omnizoom/error.hpp"

namespace omnizoom {

template <typename Scalar>
using Complex = std::complex<Scalar>;

/// Unit 3-vector on the Riemann sphere.
template <typename Scalar>
using SpherePoint = Eigen::Matrix<Scalar, 3, 1>;

/// Homogeneous plane coordinate (u : v); the complex value is u / v.
template <typename Scalar>
using HomogPoint = Eigen::Matrix<Complex<Scalar>, 2, 1>;

template <typename Scalar>
using ComplexMatrix2 = Eigen::Matrix<Complex<Scalar>, 2, 2>;

inline constexpr double kNearSingularDet = 1e-12;

/// Wraps a longitude into [-pi, pi).
template <typename Scalar>
Scalar normalize_longitude(Scalar theta) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  constexpr Scalar two_pi = 2 * pi;
  if (theta >= -pi && theta < pi) return theta;
  Scalar wrapped = theta - two_pi * std::floor((theta + pi) / two_pi);
  if (wrapped >= pi) wrapped -= two_pi;
  if (wrapped < -pi) wrapped += two_pi;
  return wrapped;
}

/// Longitude / latitude pair. theta is kept in [-pi, pi), phi in [-pi/2, pi/2].
template <typename Scalar>
struct SphericalCoord {
  Scalar theta{0};
  Scalar phi{0};

  SphericalCoord() = default;
  SphericalCoord(Scalar longitude, Scalar latitude)
      : theta(normalize_longitude(longitude)), phi(latitude) {
    constexpr Scalar half_pi = std::numbers::pi_v<Scalar> / 2;
    if (!std::isfinite(longitude) || !std::isfinite(latitude) ||
        std::abs(latitude) > half_pi * (1 + Scalar(1e-12))) {
      throw Error(ErrorCode::invalid_argument, "latitude outside [-pi/2, pi/2]");
    }
    if (phi > half_pi) phi = half_pi;
    if (phi < -half_pi) phi = -half_pi;
  }
};

template <typename Scalar>
SpherePoint<Scalar> sp(const SphericalCoord<Scalar>& c) {
  using std::cos;
  using std::sin;
  const Scalar cos_phi = cos(c.phi);
  return {cos_phi * cos(c.theta), cos_phi * sin(c.theta), sin(c.phi)};
}

/// Inverse spherical projection. Longitude uses the quadrant-aware atan2; at
/// the exact poles longitude is 0 by convention.
template <typename Scalar>
SphericalCoord<Scalar> sp_inv(const SpherePoint<Scalar>& p) {
  const Scalar rho = std::hypot(p.x(), p.y());
  SphericalCoord<Scalar> out;
  out.theta = rho == 0 ? Scalar(0) : normalize_longitude(std::atan2(p.y(), p.x()));
  out.phi = std::atan2(p.z(), rho);
  return out;
}

/// Chart A: (x + iy : 1 - z). Degenerates only at the north pole.
template <typename Scalar>
HomogPoint<Scalar> stp_chart_a(const SpherePoint<Scalar>& p) {
  return {Complex<Scalar>(p.x(), p.y()), Complex<Scalar>(1 - p.z(), 0)};
}

/// Chart B: (1 + z : x - iy). Degenerates only at the south pole.
template <typename Scalar>
HomogPoint<Scalar> stp_chart_b(const SpherePoint<Scalar>& p) {
  return {Complex<Scalar>(1 + p.z(), 0), Complex<Scalar>(p.x(), -p.y())};
}

/// Stereographic projection from (0, 0, 1), totalized through two charts.
template <typename Scalar>
HomogPoint<Scalar> homog_stp(const SpherePoint<Scalar>& p) {
  return p.z() <= 0 ? stp_chart_a(p) : stp_chart_b(p);
}

/// Inverse stereographic projection: with w = u/v this is
/// (2 Re w, 2 Im w, |w|^2 - 1) / (1 + |w|^2), written without dividing by v.
template <typename Scalar>
SpherePoint<Scalar> homog_stp_inv(const HomogPoint<Scalar>& h) {
  const Scalar scale = std::max(std::abs(h[0]), std::abs(h[1]));
  if (!(scale > 0)) throw Error(ErrorCode::invalid_argument, "homogeneous point (0 : 0)");
  const Complex<Scalar> u = h[0] / scale;
  const Complex<Scalar> v = h[1] / scale;
  const Scalar uu = std::norm(u);
  const Scalar vv = std::norm(v);
  const Scalar denom = uu + vv;
  const Complex<Scalar> xy = Scalar(2) * u * std::conj(v) / denom;
  return {xy.real(), xy.imag(), (uu - vv) / denom};
}

/// True when (u1 : v1) and (u2 : v2) name the same point of CP1.
template <typename Scalar>
bool projectively_equal(const HomogPoint<Scalar>& h1, const HomogPoint<Scalar>& h2, Scalar tol) {
  const Scalar cross = std::abs(h1[0] * h2[1] - h1[1] * h2[0]);
  return cross <= tol * h1.norm() * h2.norm();
}

/// f(z) = (az + b) / (cz + d) stored as the 2x2 complex matrix [[a, b], [c, d]].
template <typename Scalar>
class Mobius {
 public:
  using Matrix = ComplexMatrix2<Scalar>;

  Mobius() : m_(Matrix::Identity()) {}

  Mobius(Complex<Scalar> a, Complex<Scalar> b, Complex<Scalar> c, Complex<Scalar> d) {
    m_ << a, b, c, d;
    validate();
  }

  explicit Mobius(const Matrix& m) : m_(m) { validate(); }

  static Mobius identity() { return Mobius(); }

  Complex<Scalar> a() const { return m_(0, 0); }
  Complex<Scalar> b() const { return m_(0, 1); }
  Complex<Scalar> c() const { return m_(1, 0); }
  Complex<Scalar> d() const { return m_(1, 1); }
  Complex<Scalar> det() const { return a() * d() - b() * c(); }

  const Matrix& matrix() const { return m_; }

 private:
  void validate() const {
    if (!m_.allFinite()) throw Error(ErrorCode::invalid_argument, "non-finite Mobius coefficient");
    if (!(std::abs(det()) > Scalar(kNearSingularDet))) {
      throw Error(ErrorCode::near_singular, "|ad - bc| <= 1e-12");
    }
  }

  Matrix m_;
};

template <typename Scalar>
HomogPoint<Scalar> mobius_apply(const Mobius<Scalar>& m, const HomogPoint<Scalar>& h) {
  return m.matrix() * h;
}

/// m1 * m2, i.e. m2 is applied first.
template <typename Scalar>
Mobius<Scalar> compose(const Mobius<Scalar>& m1, const Mobius<Scalar>& m2) {
  return Mobius<Scalar>(typename Mobius<Scalar>::Matrix(m1.matrix() * m2.matrix()));
}

template <typename Scalar>
Mobius<Scalar> operator*(const Mobius<Scalar>& m1, const Mobius<Scalar>& m2) {
  return compose(m1, m2);
}

/// Adjugate (d, -b, -c, a); projectively the inverse.
template <typename Scalar>
Mobius<Scalar> inverse(const Mobius<Scalar>& m) {
  return Mobius<Scalar>(m.d(), -m.b(), -m.c(), m.a());
}

/// Representative with ad - bc = 1 (defined up to a global sign).
template <typename Scalar>
Mobius<Scalar> canonicalize(const Mobius<Scalar>& m) {
  const Complex<Scalar> det = m.det();
  if (!(std::abs(det) > Scalar(kNearSingularDet))) {
    throw Error(ErrorCode::near_singular, "|ad - bc| <= 1e-12");
  }
  const Complex<Scalar> root = std::sqrt(det);
  return Mobius<Scalar>(typename Mobius<Scalar>::Matrix(m.matrix() / root));
}

/// m1 and m2 are proportional, measured after removing the best complex scale.
template <typename Scalar>
bool projectively_equal(const Mobius<Scalar>& m1, const Mobius<Scalar>& m2, Scalar tol) {
  const auto& x = m1.matrix();
  const auto& y = m2.matrix();
  const Complex<Scalar> lambda = (y.adjoint() * x).trace() / y.squaredNorm();
  return (x - lambda * y).norm() <= tol * x.norm();
}

/// Sphere self-map induced by a Mobius matrix: STP^-1 o f o STP.
template <typename Scalar>
SpherePoint<Scalar> map_sphere(const Mobius<Scalar>& m, const SpherePoint<Scalar>& p) {
  return homog_stp_inv(mobius_apply(m, homog_stp(p)));
}

/// Mobius matrix acting on the sphere as the right-handed rotation by `angle`
/// about `axis`. Built from the unit quaternion (cos(a/2), sin(a/2) n) as
/// [[alpha, beta], [-conj(beta), conj(alpha)]] with alpha = cos(a/2) + i n_z sin(a/2)
/// and beta = (-n_y + i n_x) sin(a/2).
template <typename Scalar>
Mobius<Scalar> from_rotation(const SpherePoint<Scalar>& axis, Scalar angle) {
  const Scalar len = axis.norm();
  if (!(len > 0)) throw Error(ErrorCode::invalid_argument, "rotation axis has zero length");
  const SpherePoint<Scalar> n = axis / len;
  const Scalar c = std::cos(angle / 2);
  const Scalar s = std::sin(angle / 2);
  const Complex<Scalar> alpha(c, n.z() * s);
  const Complex<Scalar> beta(-n.y() * s, n.x() * s);
  return Mobius<Scalar>(alpha, beta, -std::conj(beta), std::conj(alpha));
}

/// Rotation carrying `p` onto the projection pole (0, 0, 1).
template <typename Scalar>
Mobius<Scalar> rotation_to_pole(const SpherePoint<Scalar>& p) {
  const SpherePoint<Scalar> pole = SpherePoint<Scalar>::UnitZ();
  const SpherePoint<Scalar> axis = p.cross(pole);
  const Scalar s = axis.norm();
  const Scalar c = p.dot(pole);
  if (s < Scalar(1e-15)) {
    if (c > 0) return Mobius<Scalar>::identity();
    return from_rotation<Scalar>(SpherePoint<Scalar>::UnitX(), std::numbers::pi_v<Scalar>);
  }
  return from_rotation<Scalar>(axis, std::atan2(s, c));
}

/// Sampling transform that magnifies content around `center` by `k`: an output
/// direction at angular distance delta from center samples the source at
/// roughly delta / k. Built as R^-1 diag(sqrt k, 1/sqrt k) R with R taking
/// center to the pole.
template <typename Scalar>
Mobius<Scalar> zoom_at(const SphericalCoord<Scalar>& center, Scalar k) {
  if (!(k > 0) || !std::isfinite(k)) throw Error(ErrorCode::invalid_argument, "zoom factor must be > 0");
  const Mobius<Scalar> to_pole = rotation_to_pole(sp(center));
  const Scalar root = std::sqrt(k);
  const Mobius<Scalar> scale(Complex<Scalar>(root), Complex<Scalar>(0), Complex<Scalar>(0),
                             Complex<Scalar>(1 / root));
  return compose(inverse(to_pole), compose(scale, to_pole));
}

/// User-facing view parameters. The zoom center is given in the rotated
/// (output) frame.
template <typename Scalar>
struct ViewControls {
  Scalar yaw{0};
  Scalar pitch{0};
  SphericalCoord<Scalar> zoom_center{};
  Scalar zoom_factor{1};
};

/// Forward content motion for a view: yaw about z, then pitch about x, then a
/// magnification by zoom_factor at zoom_center. The matching sampling
/// transform is inverse(from_controls(v)), whose zoom stage is
/// zoom_at(zoom_center, zoom_factor).
template <typename Scalar>
Mobius<Scalar> from_controls(const ViewControls<Scalar>& v) {
  if (!std::isfinite(v.yaw) || !std::isfinite(v.pitch)) {
    throw Error(ErrorCode::invalid_argument, "yaw and pitch must be finite");
  }
  const Mobius<Scalar> yaw = from_rotation<Scalar>(SpherePoint<Scalar>::UnitZ(), v.yaw);
  const Mobius<Scalar> pitch = from_rotation<Scalar>(SpherePoint<Scalar>::UnitX(), v.pitch);
  const Mobius<Scalar> zoom = zoom_at(v.zoom_center, Scalar(1) / v.zoom_factor);
  return canonicalize(compose(zoom, compose(pitch, yaw)));
}

using SpherePointd = SpherePoint<double>;
using HomogPointd = HomogPoint<double>;
using SphericalCoordd = SphericalCoord<double>;
using Mobiusd = Mobius<double>;
using ViewControlsd = ViewControls<double>;

}  // namespace omnizoom
