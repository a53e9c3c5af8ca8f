#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "qng/detector.hpp"
#include "qng/emitter.hpp"

namespace qng {

/// Malformed or out-of-domain configuration input. The message carries
/// the source name and, for syntax errors, the line and column.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Detector file:
//   {"symmetric": N}
//   {"channels": N, "splitting": [...], "efficiencies": [...]}
// In the long form, omitted splitting means balanced and omitted
// efficiencies mean 1.
DetectorConfig detector_from_json(const nlohmann::json& j);
DetectorConfig load_detector_config(const std::filesystem::path& path);
nlohmann::json to_json(const DetectorConfig& config);

// Ensemble file:
//   {"m": int, "eta": real, "nbar": real, "T": real, "tau_s": real | "inf",
//    "t0": real, "tM": real}
// m and eta are required; nbar = 0, T = 1, tau_s = "inf", t0 = 0, tM = 0
// by default.
EnsembleParams ensemble_from_json(const nlohmann::json& j);
EnsembleParams load_ensemble(const std::filesystem::path& path);
nlohmann::json to_json(const EnsembleParams& params);

/// Parses JSON text; syntax errors become ConfigError with line/column.
nlohmann::json parse_json_text(const std::string& text, const std::string& source_name);

}  // namespace qng
