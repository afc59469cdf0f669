#pragma once
// Core error taxonomy and version constant shared by every module.

#include <stdexcept>
#include <string>

namespace phaselab {

inline constexpr const char* kVersion = "0.1.0";

// Exit-code contract: 0 success, 2 configuration/parameter/structural error,
// 3 numeric-quality refusal (aliasing, quadrature), 4 non-contraction.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
  static constexpr int exit_code = 2;
};

struct QualityError : std::runtime_error {
  explicit QualityError(const std::string& what) : std::runtime_error(what) {}
  static constexpr int exit_code = 3;
};

struct ContractionError : std::runtime_error {
  explicit ContractionError(const std::string& what) : std::runtime_error(what) {}
  static constexpr int exit_code = 4;
};

}  // namespace phaselab
