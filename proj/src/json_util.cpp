#include "specpart/json_util.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

namespace specpart {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

double parse_atom(std::string_view s) {
  s = trim(s);
  if (s == "pi") return std::numbers::pi;
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ValidationError("cannot parse scalar '" + std::string(s) + "'");
  return v;
}

}  // namespace

double parse_scalar(std::string_view text) {
  text = trim(text);
  double sign = 1.0;
  if (!text.empty() && text.front() == '-') {
    sign = -1.0;
    text.remove_prefix(1);
  }
  // product of atoms, optionally followed by one division
  double denom = 1.0;
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    denom = parse_atom(text.substr(slash + 1));
    text = text.substr(0, slash);
  }
  double value = 1.0;
  std::size_t start = 0;
  while (true) {
    const auto star = text.find('*', start);
    value *= parse_atom(text.substr(start, star == std::string_view::npos ? star : star - start));
    if (star == std::string_view::npos) break;
    start = star + 1;
  }
  if (denom == 0.0) throw ValidationError("division by zero in scalar expression");
  return sign * value / denom;
}

double parse_scalar(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_scalar(j.get<std::string>());
  throw ValidationError("expected a number, got " + j.dump());
}

Point parse_point(const nlohmann::json& j) {
  if (j.is_number() || j.is_string()) return {parse_scalar(j), 0.0};
  if (!j.is_array() || j.empty() || j.size() > 2) throw ValidationError("expected a point, got " + j.dump());
  return {parse_scalar(j[0]), j.size() > 1 ? parse_scalar(j[1]) : 0.0};
}

nlohmann::json scalar_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace specpart
