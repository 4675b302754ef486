#pragma once

#include <cmath>
#include <set>
#include <string>

#include <json.hpp>

#include "wetrelay/channel.hpp"
#include "wetrelay/sweep.hpp"

namespace wetrelay {

/// Parse SystemParams from a JSON object. Keys mirror the field names; the
/// optional "noise_dbm_per_hz" overrides N0. Unknown keys are rejected.
inline SystemParams params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("parameter document must be a JSON object");
  static const std::set<std::string> known = {"f_c_down", "f_c_up", "d_SR", "d_RD", "alpha",
                                              "eta",      "P_C",    "P_R",  "B",    "N0",
                                              "noise_dbm_per_hz"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ConfigError("unknown parameter key: " + key);
  SystemParams p;
  auto get = [&](const char* key, double& field) {
    if (j.contains(key)) {
      if (!j.at(key).is_number()) throw ConfigError(std::string(key) + " must be a number");
      field = j.at(key).get<double>();
    }
  };
  get("f_c_down", p.f_c_down);
  get("f_c_up", p.f_c_up);
  get("d_SR", p.d_SR);
  get("d_RD", p.d_RD);
  get("alpha", p.alpha);
  get("eta", p.eta);
  get("P_C", p.P_C);
  get("P_R", p.P_R);
  get("B", p.B);
  get("N0", p.N0);
  if (j.contains("noise_dbm_per_hz")) {
    if (!j.at("noise_dbm_per_hz").is_number())
      throw ConfigError("noise_dbm_per_hz must be a number");
    p.N0 = std::pow(10.0, (j.at("noise_dbm_per_hz").get<double>() - 30.0) / 10.0);
  }
  p.validate();
  return p;
}

inline nlohmann::json params_to_json(const SystemParams& p) {
  return {{"f_c_down", p.f_c_down}, {"f_c_up", p.f_c_up}, {"d_SR", p.d_SR},
          {"d_RD", p.d_RD},         {"alpha", p.alpha},   {"eta", p.eta},
          {"P_C", p.P_C},           {"P_R", p.P_R},       {"B", p.B},
          {"N0", p.N0}};
}

/// Parse a sweep document: {"base": {...}, "swept_variable": "P_R",
/// "grid": [...], "quantities": [...], "pc_values": [...], "units": "bps"}.
inline SweepConfig sweep_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("sweep document must be a JSON object");
  SweepConfig cfg;
  if (j.contains("base")) cfg.base = params_from_json(j.at("base"));
  if (j.contains("swept_variable")) {
    const std::string v = j.at("swept_variable").get<std::string>();
    if (v == "P_R")
      cfg.swept = SweptVariable::kPR;
    else if (v == "d_SR")
      cfg.swept = SweptVariable::kDSR;
    else if (v == "P_C")
      cfg.swept = SweptVariable::kPC;
    else
      throw ConfigError("swept_variable must be one of P_R, d_SR, P_C");
  }
  if (!j.contains("grid")) throw ConfigError("sweep document needs a grid array");
  cfg.grid = j.at("grid").get<std::vector<double>>();
  if (!j.contains("quantities")) throw ConfigError("sweep document needs quantities");
  for (const auto& q : j.at("quantities"))
    cfg.quantities.push_back(quantity_from_string(q.get<std::string>()));
  if (j.contains("pc_values")) cfg.pc_values = j.at("pc_values").get<std::vector<double>>();
  if (j.contains("units")) {
    const std::string u = j.at("units").get<std::string>();
    if (u == "bps")
      cfg.units = RateUnits::kBitsPerSecond;
    else if (u == "bpsymbol")
      cfg.units = RateUnits::kBitsPerSymbol;
    else
      throw ConfigError("units must be bps or bpsymbol");
  }
  cfg.validate();
  return cfg;
}

inline nlohmann::json sweep_rows_to_json(const std::vector<SweepRow>& rows,
                                         const SweepConfig& cfg) {
  nlohmann::json arr = nlohmann::json::array();
  const auto names = cfg.column_names();
  for (const auto& row : rows) {
    nlohmann::json r;
    r["swept_value"] = row.swept_value;
    nlohmann::json cells;
    for (size_t i = 0; i < row.cells.size(); ++i) {
      if (row.cells[i].error.empty())
        cells[names[i]] = row.cells[i].value;
      else
        cells[names[i]] = {{"error", row.cells[i].error}};
    }
    r["cells"] = cells;
    r["case_tag"] = row.case_tag;
    r["bottleneck"] = row.bottleneck;
    arr.push_back(r);
  }
  return arr;
}

inline nlohmann::json dist_to_json(const MassPointDistribution& d) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& mp : d.points) arr.push_back({mp.value, mp.prob});
  return arr;
}

}  // namespace wetrelay
