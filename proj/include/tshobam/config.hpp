#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tshobam/network.hpp"
#include "tshobam/simulate.hpp"
#include "tshobam/timescale.hpp"

namespace tshobam {

struct AnalysisConfig {
  double window_lo = 0.0;
  double window_hi = 1000.0;
  /// Scan step inside dense pieces; defaults to the time-scale resolution.
  std::optional<double> density;
  double tol = 1e-8;
  int max_iter = 60;
  double tail_tol = 1e-10;
  double solve_lo = 0.0;
  double solve_hi = 40.0;
  double safety_fraction = 0.9;
  std::optional<double> beta;
  double t0 = 0.0;
  bool symmetrize = false;
};

struct RunConfig {
  double horizon = 50.0;
  /// Explicit initial functions; when absent a seeded random history is used.
  std::optional<InitialHistory> initial;
  bool derive_init_delta = true;
  std::uint64_t seed = 1;
  double amplitude = 0.5;
};

struct ExperimentConfig {
  TimeScale timescale = TimeScale::continuum();
  NetworkSpec network;
  AnalysisConfig analysis;
  RunConfig run;
  /// FNV-1a of the configuration text, as 16 hex digits.
  std::string hash;
};

/// Throws ConfigError naming the JSON path of the first offending key.
/// Coefficient families that are omitted default to the constant 0.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

std::string fnv1a_hex(std::string_view bytes);

}  // namespace tshobam
