#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tshobam/analysis.hpp"
#include "tshobam/config.hpp"

namespace tshobam {

inline constexpr const char* kToolVersion = "0.1.0";

/// Config hash, scan window and tool version; every command embeds it.
nlohmann::json manifest(const ExperimentConfig& cfg, const std::string& command,
                        const CoefficientBounds& bounds);

nlohmann::json to_json(const CoefficientBounds& b);
nlohmann::json to_json(const HypothesisReport& rep);
nlohmann::json to_json(const StabilityCertificate& cert);
nlohmann::json to_json(const PicardResult& res);
/// Summary only; the series go to CSV.
nlohmann::json to_json(const EnvelopeReport& env);

void write_envelope_csv(std::ostream& os, const EnvelopeReport& env);
/// V and its forward difference quotient per point.
void write_lyapunov_csv(std::ostream& os, const std::vector<LyapunovTerms>& terms,
                        const std::vector<double>& dini);
void write_profile_csv(std::ostream& os, const std::vector<std::pair<double, double>>& profile);

/// Pretty-printed, keys sorted, trailing newline.
void write_json(std::ostream& os, const nlohmann::json& doc);

}  // namespace tshobam
