#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "fracflow/flow.hpp"
#include "fracflow/grid.hpp"
#include "fracflow/kernels.hpp"
#include "fracflow/quadrature.hpp"

namespace fracflow {

/// Fully-resolved run configuration. The Hoelder triple (alpha, beta, gamma)
/// is metadata: the admissible range is max{alpha, beta} < gamma <
/// min{1, alpha + beta}; a triple outside it is flagged "nonconforming" in
/// the resolved echo but never blocks execution.
struct RunConfig {
  FlowParams params;
  GridSpec grid{1, 256};
  QuadratureScheme scheme = QuadratureScheme::defaults(1);
  StepperConfig stepper;
  double beta = 0.6;
  double gamma = 0.9;
  std::uint64_t seed = 0x5eed2026ULL;
  std::filesystem::path out_dir = "out";
  int threads = 0;  // 0: hardware concurrency

  bool holder_conforming() const;

  /// Complete "key = value" echo of every field (shortest round-trip decimal
  /// rendering); parsing it back reproduces the config bit-for-bit.
  std::string resolved_text() const;
};

/// Applies one key/value pair (the file format's vocabulary). Setting "dim"
/// switches params/grid dimension and resets the quadrature scheme to that
/// dimension's defaults, so dimension-specific node counts must come after
/// it. Unknown keys, malformed values, and domain violations (e.g. order out
/// of range, odd grid size) throw std::invalid_argument.
void apply_config_override(RunConfig& cfg, std::string_view key,
                           std::string_view value);

/// Flat "key = value" text; blank lines and lines starting with '#' are
/// ignored. Later keys override earlier ones.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig parse_config_file(const std::filesystem::path& path,
                            RunConfig base = {});

/// Writes cfg.resolved_text() to out_dir/config.resolved (creating out_dir).
void write_resolved(const RunConfig& cfg);

}  // namespace fracflow
