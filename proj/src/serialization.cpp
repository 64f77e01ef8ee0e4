#include "omnizoom/serialization.hpp"

#include <charconv>
#include <cmath>

namespace omnizoom {

std::array<double, 8> matrix_coefficients(const Mobiusd& m) {
  return {m.a().real(), m.a().imag(), m.b().real(), m.b().imag(),
          m.c().real(), m.c().imag(), m.d().real(), m.d().imag()};
}

Mobiusd matrix_from_coefficients(const std::array<double, 8>& v) {
  return Mobiusd({v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]}, {v[6], v[7]});
}

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string format_matrix(const Mobiusd& m) {
  std::string out;
  for (double v : matrix_coefficients(m)) {
    if (!out.empty()) out += ',';
    out += shortest(v);
  }
  return out;
}

std::vector<double> parse_floats(std::string_view text) {
  std::vector<double> values;
  for (;;) {
    const auto comma = text.find(',');
    std::string_view field = trim(text.substr(0, comma));
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0;
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || end != field.data() + field.size() || !std::isfinite(v)) {
      throw Error(ErrorCode::invalid_argument, "malformed number '" + std::string(field) + "'");
    }
    values.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return values;
}

Mobiusd parse_matrix(std::string_view text) {
  const std::vector<double> v = parse_floats(text);
  if (v.size() != 8) throw Error(ErrorCode::invalid_argument, "matrix needs exactly 8 numbers");
  std::array<double, 8> coeffs{};
  std::copy(v.begin(), v.end(), coeffs.begin());
  return matrix_from_coefficients(coeffs);
}

ResampleKernel parse_kernel(std::string_view name) {
  if (name == "spherical") return ResampleKernel::spherical;
  if (name == "nearest") return ResampleKernel::nearest;
  if (name == "bilinear" || name == "planar_bilinear") return ResampleKernel::planar_bilinear;
  if (name == "bicubic" || name == "planar_bicubic") return ResampleKernel::planar_bicubic;
  throw Error(ErrorCode::invalid_argument, "unknown kernel '" + std::string(name) + "'");
}

WarpOrder parse_order(std::string_view name) {
  if (name == "up-first" || name == "upsample_then_transform") return WarpOrder::upsample_then_transform;
  if (name == "transform-first" || name == "transform_then_upsample") return WarpOrder::transform_then_upsample;
  throw Error(ErrorCode::invalid_argument, "unknown order '" + std::string(name) + "'");
}

nlohmann::ordered_json to_json(const ViewControlsd& v) {
  nlohmann::ordered_json j;
  j["yaw"] = v.yaw;
  j["pitch"] = v.pitch;
  j["zoom_center"] = {{"theta", v.zoom_center.theta}, {"phi", v.zoom_center.phi}};
  j["zoom_factor"] = v.zoom_factor;
  return j;
}

ViewControlsd controls_from_json(const nlohmann::json& j) {
  ViewControlsd v;
  v.yaw = j.at("yaw").get<double>();
  v.pitch = j.at("pitch").get<double>();
  v.zoom_center = SphericalCoordd(j.at("zoom_center").at("theta").get<double>(),
                                  j.at("zoom_center").at("phi").get<double>());
  v.zoom_factor = j.at("zoom_factor").get<double>();
  return v;
}

}  // namespace omnizoom
