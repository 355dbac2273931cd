#pragma once

#include <stdexcept>
#include <string>

namespace pqc {

/// Bad user-supplied configuration or input file (process exit code 2).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Diverging or non-finite numerics (process exit code 4).
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Pipeline stage failure wrapping the underlying cause (exit code 3).
struct stage_error : std::runtime_error {
  stage_error(const std::string& stage, const std::string& cause)
      : std::runtime_error("stage '" + stage + "' failed: " + cause),
        stage_name(stage) {}
  std::string stage_name;
};

}  // namespace pqc
