#pragma once

// Test-only helpers: random generators, synthetic panoramas and the 3D
// rotation oracle. Nothing here calls into the geometry being tested except
// where noted.

#include <Eigen/Geometry>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>

#include "omnizoom/geometry.hpp"
#include "omnizoom/image.hpp"

namespace omnizoom::testing {

constexpr double kPi = std::numbers::pi;

inline SpherePointd random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  SpherePointd p;
  do {
    p = {n(rng), n(rng), n(rng)};
  } while (p.norm() < 1e-6);
  return p.normalized();
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random matrix with standard complex normal entries, canonicalized.
inline Mobiusd random_mobius(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    const Complex<double> a(n(rng), n(rng)), b(n(rng), n(rng)), c(n(rng), n(rng)), d(n(rng), n(rng));
    if (std::abs(a * d - b * c) > 1e-3) return canonicalize(Mobiusd(a, b, c, d));
  }
}

/// Random Mobius map with bounded distortion: a rotation composed with a
/// zoom of factor in [0.6, 1.7] at a random center.
inline Mobiusd random_mild_mobius(std::mt19937_64& rng) {
  const Mobiusd r = from_rotation(random_unit(rng), uniform(rng, -kPi, kPi));
  const SphericalCoordd center = sp_inv(random_unit(rng));
  return canonicalize(compose(zoom_at(center, uniform(rng, 0.6, 1.7)), r));
}

/// Rodrigues rotation of p about the unit axis n by angle.
inline SpherePointd rotate(const SpherePointd& n, double angle, const SpherePointd& p) {
  return Eigen::AngleAxisd(angle, n.normalized()) * p;
}

inline double max_abs_diff(const ErpImage& a, const ErpImage& b) {
  return (a.samples() - b.samples()).abs().maxCoeff();
}

/// Smooth function of the 3D position, sampled at pixel centers, so it is
/// band-limited on the sphere itself (no seam, no polar singularity).
inline ErpImage smooth_panorama(Index height, Index channels = 3, std::uint64_t seed = 7) {
  std::mt19937_64 rng(seed);
  struct Wave {
    SpherePointd k;
    double phase;
    double amp;
  };
  std::vector<std::vector<Wave>> waves(channels);
  for (auto& list : waves) {
    for (int t = 0; t < 4; ++t) {
      list.push_back({random_unit(rng) * uniform(rng, 3.0, 9.0), uniform(rng, 0, 2 * kPi), 0.1});
    }
  }
  ErpImage img(height, 2 * height, channels);
  for (Index i = 0; i < height; ++i) {
    const double phi = kPi / 2 - kPi * (i + 0.5) / height;
    for (Index j = 0; j < 2 * height; ++j) {
      const double theta = 2 * kPi * (j + 0.5) / (2 * height) - kPi;
      const SpherePointd p(std::cos(phi) * std::cos(theta), std::cos(phi) * std::sin(theta), std::sin(phi));
      for (Index c = 0; c < channels; ++c) {
        double v = 0.5;
        for (const Wave& w : waves[c]) v += w.amp * std::cos(w.k.dot(p) + w.phase);
        img(i, j, c) = v;
      }
    }
  }
  return img;
}

inline ErpImage random_image(Index height, Index width, Index channels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ErpImage img(height, width, channels, AspectPolicy::any);
  for (Index k = 0; k < img.samples().size(); ++k) img.samples().data()[k] = uniform(rng, 0, 1);
  return img;
}

inline ErpImage checkerboard(Index height, Index cell, Index channels = 1) {
  ErpImage img(height, 2 * height, channels);
  for (Index i = 0; i < height; ++i) {
    for (Index j = 0; j < 2 * height; ++j) {
      for (Index c = 0; c < channels; ++c) img(i, j, c) = ((i / cell + j / cell) % 2) ? 1.0 : 0.0;
    }
  }
  return img;
}

/// Exact column rotation: out(:, j) = src(:, j - k).
inline ErpImage column_shift(const ErpImage& src, Index k) {
  ErpImage out(src.height(), src.width(), src.channels(), AspectPolicy::any);
  for (Index i = 0; i < src.height(); ++i) {
    for (Index j = 0; j < src.width(); ++j) {
      for (Index c = 0; c < src.channels(); ++c) out(i, j, c) = src(i, wrap_index(j - k, src.width()), c);
    }
  }
  return out;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("omnizoom-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace omnizoom::testing
