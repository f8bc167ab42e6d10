#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "specpart/errors.hpp"
#include "specpart/grid.hpp"

namespace specpart {

/// Reads a scalar written either as a JSON number or as a short string
/// expression: "inf", "pi", "-pi/2", "3*pi/4", "2.5".
double parse_scalar(const nlohmann::json& j);
double parse_scalar(std::string_view text);
inline double parse_scalar(const char* text) { return parse_scalar(std::string_view(text)); }
inline double parse_scalar(const std::string& text) { return parse_scalar(std::string_view(text)); }

/// Reads a 1- or 2-element array of scalars; a missing second entry is 0.
Point parse_point(const nlohmann::json& j);

/// JSON has no infinity; +inf is written as the string "inf".
nlohmann::json scalar_to_json(double v);

inline const nlohmann::json& require_key(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError(std::string("missing key '") + key + "' in " + j.dump());
  }
  return j.at(key);
}

}  // namespace specpart
