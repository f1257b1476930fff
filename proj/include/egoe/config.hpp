#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "egoe/archive.hpp"
#include "egoe/ensemble.hpp"
#include "egoe/errors.hpp"
#include "egoe/fluct_stats.hpp"

namespace egoe {

inline constexpr std::string_view kRunFormatVersion = "egoe-run/1";

/// Everything one CLI run needs. Loaded from JSON; unknown keys are rejected.
struct RunConfig {
  EnsembleSpec ensemble;
  std::vector<int> orders{2, 3, 4, 5, 6};
  double trim = kDefaultTrim;
  double l_max = 60.0;
  double histogram_bin = 0.1;
  double histogram_max = 4.0;
  double oversample = 4.0;
  std::string output_dir = ".";

  void validate() const {
    ensemble.validate();
    if (orders.empty()) throw DomainError("config: orders must not be empty");
    for (int o : orders) {
      if (o < 2 || o > 6) throw DomainError("config: orders must be drawn from {2,...,6}, got " + std::to_string(o));
    }
    if (!(trim >= 0.0 && trim < 0.5)) throw DomainError("config: trim must lie in [0, 0.5)");
    if (!(l_max >= 2.0 && l_max <= 1000.0)) throw DomainError("config: l_max must lie in [2, 1000]");
    if (!(histogram_bin > 0.0 && histogram_bin <= 1.0)) throw DomainError("config: histogram_bin must lie in (0, 1]");
    if (!(histogram_max > histogram_bin && histogram_max <= 20.0)) throw DomainError("config: histogram_max must lie in (bin, 20]");
    if (!(oversample >= 1.0 && oversample <= 64.0)) throw DomainError("config: oversample must lie in [1, 64]");
  }
};

inline nlohmann::json to_json(const RunConfig& c) {
  return nlohmann::json{{"format_version", std::string(kRunFormatVersion)},
                        {"ensemble", to_json(c.ensemble)},
                        {"orders", c.orders},
                        {"trim", c.trim},
                        {"l_max", c.l_max},
                        {"histogram_bin", c.histogram_bin},
                        {"histogram_max", c.histogram_max},
                        {"oversample", c.oversample},
                        {"output_dir", c.output_dir}};
}

inline RunConfig run_config_from_json(const nlohmann::json& j) {
  static const std::vector<std::string> known{"format_version", "ensemble", "orders", "trim", "l_max",
                                              "histogram_bin", "histogram_max", "oversample", "output_dir"};
  if (!j.is_object()) throw DomainError("config: expected a JSON object");
  RunConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        throw DomainError("config: unknown key '" + key + "'");
      }
    }
    if (j.contains("format_version") && j.at("format_version").get<std::string>() != kRunFormatVersion) {
      throw DomainError("config: unsupported format_version '" + j.at("format_version").get<std::string>() + "'");
    }
    if (j.contains("ensemble")) c.ensemble = ensemble_spec_from_json(j.at("ensemble"));
    if (j.contains("orders")) c.orders = j.at("orders").get<std::vector<int>>();
    if (j.contains("trim")) c.trim = j.at("trim").get<double>();
    if (j.contains("l_max")) c.l_max = j.at("l_max").get<double>();
    if (j.contains("histogram_bin")) c.histogram_bin = j.at("histogram_bin").get<double>();
    if (j.contains("histogram_max")) c.histogram_max = j.at("histogram_max").get<double>();
    if (j.contains("oversample")) c.oversample = j.at("oversample").get<double>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("config '" + path.string() + "': " + e.what());
  }
  return run_config_from_json(j);
}

}  // namespace egoe
