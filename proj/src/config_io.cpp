#include "qng/config_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace qng {

using nlohmann::json;

namespace {

std::pair<std::size_t, std::size_t> line_and_column(const std::string& text, std::size_t offset) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known, const char* what) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError(std::string("unknown key '") + key + "' in " + what);
  }
}

double number(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::vector<double> number_array(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_array()) throw ConfigError(std::string("'") + key + "' must be an array");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) throw ConfigError(std::string("'") + key + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

int integer(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(std::string("'") + key + "' must be an integer");
  return v.get<int>();
}

template <class F>
auto rethrow_as_config_error(F&& f, const std::string& source) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source + ": " + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

}  // namespace

json parse_json_text(const std::string& text, const std::string& source_name) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError(source_name + ":" + std::to_string(line) + ":" + std::to_string(column) +
                      ": JSON syntax error");
  }
}

DetectorConfig detector_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("detector configuration must be a JSON object");
  reject_unknown_keys(j, {"symmetric", "channels", "splitting", "efficiencies"}, "detector");
  if (j.contains("symmetric")) {
    if (j.contains("splitting") || j.contains("efficiencies")) {
      throw ConfigError("'symmetric' cannot be combined with explicit ratios");
    }
    const int n = integer(j, "symmetric");
    if (j.contains("channels") && integer(j, "channels") != n) {
      throw ConfigError("'channels' disagrees with 'symmetric'");
    }
    if (n < 1) throw ConfigError("'symmetric' must be a positive channel count");
    return DetectorConfig::symmetric(n);
  }

  int n = -1;
  if (j.contains("channels")) n = integer(j, "channels");
  std::vector<double> split;
  std::vector<double> eff;
  if (j.contains("splitting")) split = number_array(j, "splitting");
  if (j.contains("efficiencies")) eff = number_array(j, "efficiencies");
  if (n < 0) n = static_cast<int>(!split.empty() ? split.size() : eff.size());
  if (n < 1) throw ConfigError("detector needs a positive channel count");
  if (split.empty()) split.assign(n, 1.0 / n);
  if (eff.empty()) eff.assign(n, 1.0);
  if (static_cast<int>(split.size()) != n || static_cast<int>(eff.size()) != n) {
    throw ConfigError("'splitting' and 'efficiencies' need one entry per channel");
  }
  try {
    return DetectorConfig(std::move(split), std::move(eff));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

DetectorConfig load_detector_config(const std::filesystem::path& path) {
  const json j = parse_json_text(read_file(path), path.string());
  return rethrow_as_config_error([&] { return detector_from_json(j); }, path.string());
}

json to_json(const DetectorConfig& config) {
  return {{"channels", config.channels()},
          {"splitting", config.splitting()},
          {"efficiencies", config.efficiencies()}};
}

EnsembleParams ensemble_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("ensemble configuration must be a JSON object");
  reject_unknown_keys(j, {"m", "eta", "nbar", "T", "tau_s", "t0", "tM"}, "ensemble");
  if (!j.contains("m")) throw ConfigError("ensemble needs 'm'");
  if (!j.contains("eta")) throw ConfigError("ensemble needs 'eta'");
  EnsembleParams p;
  p.emitters = integer(j, "m");
  p.efficiency = number(j, "eta");
  if (j.contains("nbar")) p.noise_mean = number(j, "nbar");
  if (j.contains("T")) p.loss = number(j, "T");
  if (j.contains("tau_s")) {
    const json& tau = j.at("tau_s");
    if (tau.is_string()) {
      if (tau.get<std::string>() != "inf") throw ConfigError("'tau_s' must be a number or \"inf\"");
      p.storage_time = std::numeric_limits<double>::infinity();
    } else {
      p.storage_time = number(j, "tau_s");
    }
  }
  if (j.contains("t0")) p.window_start = number(j, "t0");
  if (j.contains("tM")) p.window_length = number(j, "tM");
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

EnsembleParams load_ensemble(const std::filesystem::path& path) {
  const json j = parse_json_text(read_file(path), path.string());
  return rethrow_as_config_error([&] { return ensemble_from_json(j); }, path.string());
}

json to_json(const EnsembleParams& p) {
  json j = {{"m", p.emitters}, {"eta", p.efficiency}, {"nbar", p.noise_mean}, {"T", p.loss},
            {"t0", p.window_start}, {"tM", p.window_length}};
  if (std::isfinite(p.storage_time)) {
    j["tau_s"] = p.storage_time;
  } else {
    j["tau_s"] = "inf";
  }
  return j;
}

}  // namespace qng
