#include "omnizoom/metrics.hpp"

#include <array>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace omnizoom {

Eigen::ArrayXd ws_weights(Index height) {
  if (height < 2) throw Error(ErrorCode::bad_dims, "weight map needs H >= 2");
  Eigen::ArrayXd w(height);
  // cos(phi_i) = sin(pi (i + 0.5) / H); mirrored so w_i == w_{H-1-i} bit for bit.
  for (Index i = 0; i < height; ++i) {
    const Index k = std::min(i, height - 1 - i);
    w[i] = std::sin(std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(height));
  }
  return w;
}

namespace {

void require_same_shape(const ErpImage& a, const ErpImage& b) {
  if (!a.same_shape(b)) throw Error(ErrorCode::dim_mismatch, "images differ in size or channel count");
}

constexpr int kSsimRadius = 5;
constexpr double kSsimSigma = 1.5;

std::array<double, 2 * kSsimRadius + 1> gaussian_taps() {
  std::array<double, 2 * kSsimRadius + 1> g{};
  double sum = 0;
  for (int k = -kSsimRadius; k <= kSsimRadius; ++k) {
    g[k + kSsimRadius] = std::exp(-(k * k) / (2 * kSsimSigma * kSsimSigma));
    sum += g[k + kSsimRadius];
  }
  for (double& v : g) v /= sum;
  return g;
}

using Plane = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Separable Gaussian blur: wrap along columns, clamp along rows.
Plane blur(const Plane& in) {
  static const auto g = gaussian_taps();
  const Index h = in.rows();
  const Index w = in.cols();
  Plane horizontal = Plane::Zero(h, w);
  for (Index i = 0; i < h; ++i) {
    for (Index j = 0; j < w; ++j) {
      double acc = 0;
      for (int k = -kSsimRadius; k <= kSsimRadius; ++k) acc += g[k + kSsimRadius] * in(i, wrap_index(j + k, w));
      horizontal(i, j) = acc;
    }
  }
  Plane out = Plane::Zero(h, w);
  for (Index i = 0; i < h; ++i) {
    for (int k = -kSsimRadius; k <= kSsimRadius; ++k) {
      out.row(i) += g[k + kSsimRadius] * horizontal.row(clamp_index(i + k, h));
    }
  }
  return out;
}

Plane channel_plane(const ErpImage& img, Index c) {
  Plane p(img.height(), img.width());
  for (Index i = 0; i < img.height(); ++i) {
    for (Index j = 0; j < img.width(); ++j) p(i, j) = img(i, j, c);
  }
  return p;
}

}  // namespace

double ws_psnr(const ErpImage& a, const ErpImage& b, double peak) {
  require_same_shape(a, b);
  const Eigen::ArrayXd w = ws_weights(a.height());
  const Eigen::ArrayXd row_sq = (a.samples() - b.samples()).square().rowwise().sum();
  const double weighted = (row_sq * w).sum();
  const double total_weight = w.sum() * static_cast<double>(a.width() * a.channels());
  const double wmse = weighted / total_weight;
  if (wmse < kZeroWmse) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / wmse);
}

double ws_ssim(const ErpImage& a, const ErpImage& b, double peak) {
  require_same_shape(a, b);
  if (a.height() < 2 * kSsimRadius + 1 || a.width() < 2 * kSsimRadius + 1) {
    throw Error(ErrorCode::too_small, "WS-SSIM needs H, W >= 11");
  }
  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  const Eigen::ArrayXd w = ws_weights(a.height());
  const double weight_sum = w.sum() * static_cast<double>(a.width());

  double total = 0;
  for (Index c = 0; c < a.channels(); ++c) {
    const Plane x = channel_plane(a, c);
    const Plane y = channel_plane(b, c);
    const Plane mu_x = blur(x);
    const Plane mu_y = blur(y);
    const Plane var_x = blur(x * x) - mu_x.square();
    const Plane var_y = blur(y * y) - mu_y.square();
    const Plane cov = blur(x * y) - mu_x * mu_y;
    const Plane ssim = ((2 * mu_x * mu_y + c1) * (2 * cov + c2)) /
                       ((mu_x.square() + mu_y.square() + c1) * (var_x + var_y + c2));
    total += (ssim.rowwise().sum() * w).sum() / weight_sum;
  }
  return total / static_cast<double>(a.channels());
}

nlohmann::ordered_json metric_value_json(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  return value;
}

nlohmann::ordered_json to_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  j["metric"] = report.metric;
  j["value"] = metric_value_json(report.value);
  j["peak"] = report.peak;
  j["dims"] = {report.height, report.width, report.channels};
  return j;
}

}  // namespace omnizoom
