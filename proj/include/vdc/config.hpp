#pragma once

#include <string>

#include "vdc/simulation.hpp"

namespace vdc {

/// Malformed config text (syntax); message carries line/column.
struct ParseError : ModelError {
  using ModelError::ModelError;
};

/// Well-formed text with invalid content; message lists every offending
/// key path, not just the first.
struct ValidationError : ModelError {
  using ModelError::ModelError;
};

/// Everything one config file describes.
struct LoadedConfig {
  ManipulatorModel model;
  ControllerGains gains;
  Scenario scenario;
};

LoadedConfig load_config(const std::string& path);
LoadedConfig parse_config(const std::string& text);  // same, from memory

/// Serializes with 12 significant digits; parse_config(write_config(c))
/// reproduces every numeric field.
std::string write_config(const LoadedConfig& c);

/// Joint-space snapshot for one-shot inverse dynamics: per structure
/// q/dq/ddq (and xt/dxt/ddxt), plus an optional tool wrench.
struct StateFile {
  std::vector<JointState> joints;
  std::vector<JointAccel> accels;
  SpatialVec tool_wrench = SpatialVec::Zero();
};

StateFile load_state_file(const std::string& path, size_t n_structures);

}  // namespace vdc
