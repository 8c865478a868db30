#pragma once

#include <stdexcept>
#include <string>

#include "fcdiff/experiment.hpp"

namespace fcdiff {

/// Configuration problem. `path()` names the offending field, e.g.
/// `nodes[3].profile.sinusoidal.beta`; it is empty for whole-spec
/// constraint violations.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Parses and validates a YAML experiment description (schema in
/// configs/README.md).
ExperimentSpec parse_spec(const std::string& yaml_text);
ExperimentSpec load_spec(const std::string& path);

/// Emits a spec in the same schema; parse_spec(dump_spec(s)) reproduces s.
std::string dump_spec(const ExperimentSpec& spec);

/// Builtin name or path to a YAML file.
ExperimentSpec resolve_spec(const std::string& name_or_path);

}  // namespace fcdiff
