#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dfpart {

/// Failure categories raised while validating inputs or running the pipeline.
enum class Errc {
  dangling_edge,
  cycle_detected,
  negative_weight,
  control_edge_with_bytes,
  self_loop,
  duplicate_node,
  variable_not_stateful,
  invalid_device,
  unknown_device,
  unknown_node,
  untagged_relocatable_node,
  invalid_config,
  schema,
};

std::string_view to_string(Errc code);

/// Validation error. `witness()` names the offending entities (node ids for
/// cycles, endpoint ids for dangling edges, and so on).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::vector<std::string> witness = {})
      : std::runtime_error(message), code_(code), witness_(std::move(witness)) {}

  Errc code() const noexcept { return code_; }
  const std::vector<std::string>& witness() const noexcept { return witness_; }

 private:
  Errc code_;
  std::vector<std::string> witness_;
};

/// Filesystem failure (unreadable input, unwritable output).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dfpart
