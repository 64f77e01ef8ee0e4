#pragma once

#include <limits>
#include <string>

#include <nlohmann/json.hpp>

#include "omnizoom/image.hpp"

namespace omnizoom {

/// cos(latitude) of every pixel-center row; rows are broadcast over columns.
Eigen::ArrayXd ws_weights(Index height);

/// WMSE below this reports +inf.
inline constexpr double kZeroWmse = 1e-20;

/// Weighted-to-spherically-uniform PSNR in dB. Returns +inf for identical images.
double ws_psnr(const ErpImage& a, const ErpImage& b, double peak = 1.0);

/// SSIM map (11x11 Gaussian window, sigma 1.5, longitude wraps, latitude
/// clamps) averaged with cos-latitude weights; channels are averaged.
double ws_ssim(const ErpImage& a, const ErpImage& b, double peak = 1.0);

struct MetricReport {
  std::string metric;  // "ws_psnr" or "ws_ssim"
  double value = 0;
  double peak = 1.0;
  Index height = 0;
  Index width = 0;
  Index channels = 0;
};

/// {metric, value, peak, dims}; +inf is written as the string "inf".
nlohmann::ordered_json to_json(const MetricReport& report);

/// Number or "inf"/"-inf" for non-finite values.
nlohmann::ordered_json metric_value_json(double value);

}  // namespace omnizoom
