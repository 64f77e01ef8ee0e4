#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "omnizoom/geometry.hpp"
#include "omnizoom/resampler.hpp"
#include "omnizoom/warp.hpp"

namespace omnizoom {

/// a.re, a.im, b.re, b.im, c.re, c.im, d.re, d.im
std::array<double, 8> matrix_coefficients(const Mobiusd& m);
Mobiusd matrix_from_coefficients(const std::array<double, 8>& v);

/// Eight comma-separated decimals, shortest round-trip formatting.
std::string format_matrix(const Mobiusd& m);

/// Throws invalid_argument on malformed text, near_singular on det ~ 0.
Mobiusd parse_matrix(std::string_view text);

/// Comma-separated list of finite decimals.
std::vector<double> parse_floats(std::string_view text);

ResampleKernel parse_kernel(std::string_view name);
WarpOrder parse_order(std::string_view name);

nlohmann::ordered_json to_json(const ViewControlsd& v);
ViewControlsd controls_from_json(const nlohmann::json& j);

}  // namespace omnizoom
