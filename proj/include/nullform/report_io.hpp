// SPDX-License-Identifier: MIT
//
// Report serialization: CSV and JSON emission for EstimateReport, JSON
// config loading, and the round-trip parse used to validate outputs.
//
// CSV is the determinism surface — identical sweeps must produce
// byte-identical files regardless of worker count — so every floating-point
// field goes through one fixed shortest-round-trip formatter and records are
// emitted in task order (itself canonical).  JSON carries the same records
// plus the summary block for human and scripted consumers.

#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nullform/harness.hpp"

namespace nullform {

namespace detail {

// Shortest decimal string that round-trips the double (std::to_chars default).
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (res.ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), res.ptr);
}

}  // namespace detail

inline constexpr const char* kCsvHeader = "n,N,L,nullform,mu,lam,seed,lhs,rhs,ratio";

inline std::string to_csv(const EstimateReport& report) {
  if (report.records.empty()) throw std::invalid_argument("to_csv: empty report");
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : report.records) {
    out += std::to_string(r.n);
    out += ',';
    out += std::to_string(r.N);
    out += ',';
    out += detail::format_double(r.L);
    out += ',';
    out += r.nullform;
    out += ',';
    out += detail::format_double(r.mu);
    out += ',';
    out += detail::format_double(r.lam);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += detail::format_double(r.lhs);
    out += ',';
    out += detail::format_double(r.rhs);
    out += ',';
    out += detail::format_double(r.ratio);
    out += '\n';
  }
  return out;
}

inline nlohmann::json config_to_json(const SweepConfig& cfg) {
  nlohmann::json j;
  j["dim"] = cfg.dim;
  j["N"] = cfg.N;
  j["L"] = cfg.L;
  j["lam_list"] = cfg.lam_list;
  j["mu_list"] = cfg.mu_list;
  j["seeds"] = cfg.seeds;
  j["kinds"] = cfg.kinds;
  j["workers"] = cfg.workers;
  j["nodes_per_panel"] = cfg.nodes_per_panel;
  j["output"] = cfg.output;
  j["format"] = cfg.format;
  return j;
}

inline SweepConfig config_from_json(const nlohmann::json& j) {
  SweepConfig cfg;
  if (j.contains("dim")) cfg.dim = j.at("dim").get<int>();
  if (j.contains("N")) cfg.N = j.at("N").get<int>();
  if (j.contains("L")) cfg.L = j.at("L").get<double>();
  if (j.contains("lam_list")) cfg.lam_list = j.at("lam_list").get<std::vector<int>>();
  if (j.contains("mu_list")) cfg.mu_list = j.at("mu_list").get<std::vector<int>>();
  if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("kinds")) cfg.kinds = j.at("kinds").get<std::vector<std::string>>();
  if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();
  if (j.contains("nodes_per_panel"))
    cfg.nodes_per_panel = j.at("nodes_per_panel").get<int>();
  if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
  if (j.contains("format")) cfg.format = j.at("format").get<std::string>();
  cfg.validate();
  return cfg;
}

inline SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_config: " + path + ": " + e.what());
  }
  return config_from_json(j);
}

inline nlohmann::json to_json(const EstimateReport& report) {
  if (report.records.empty()) throw std::invalid_argument("to_json: empty report");
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : report.records) {
    recs.push_back({{"n", r.n},
                    {"N", r.N},
                    {"L", r.L},
                    {"nullform", r.nullform},
                    {"mu", r.mu},
                    {"lam", r.lam},
                    {"seed", r.seed},
                    {"lhs", r.lhs},
                    {"rhs", r.rhs},
                    {"ratio", r.ratio}});
  }
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& gstat : report.groups) {
    groups.push_back({{"mu", gstat.mu},
                      {"lam", gstat.lam},
                      {"sup_ratio", gstat.sup_ratio},
                      {"median_ratio", gstat.median_ratio},
                      {"count", gstat.count}});
  }
  nlohmann::json summary = {{"sup_ratio", report.sup_ratio},
                            {"median_ratio", report.median_ratio},
                            {"config", config_to_json(report.config)}};
  if (report.has_fit) {
    summary["slope"] = report.slope;
    summary["residual"] = report.residual;
  } else {
    summary["slope"] = nullptr;
    summary["residual"] = nullptr;
  }
  summary["groups"] = groups;
  return nlohmann::json{{"records", recs}, {"summary", summary}};
}

inline EstimateReport report_from_json(const nlohmann::json& j) {
  EstimateReport rep;
  for (const auto& e : j.at("records")) {
    EstimateRecord r;
    r.n = e.at("n").get<int>();
    r.N = e.at("N").get<int>();
    r.L = e.at("L").get<double>();
    r.nullform = e.at("nullform").get<std::string>();
    r.mu = e.at("mu").get<double>();
    r.lam = e.at("lam").get<double>();
    r.seed = e.at("seed").get<std::uint64_t>();
    r.lhs = e.at("lhs").get<double>();
    r.rhs = e.at("rhs").get<double>();
    r.ratio = e.at("ratio").get<double>();
    rep.records.push_back(std::move(r));
  }
  if (rep.records.empty()) throw std::invalid_argument("report_from_json: empty report");
  const auto& s = j.at("summary");
  rep.sup_ratio = s.at("sup_ratio").get<double>();
  rep.median_ratio = s.at("median_ratio").get<double>();
  if (s.contains("slope") && !s.at("slope").is_null()) {
    rep.slope = s.at("slope").get<double>();
    rep.residual = s.at("residual").get<double>();
    rep.has_fit = true;
  }
  if (s.contains("groups"))
    for (const auto& e : s.at("groups"))
      rep.groups.push_back(GroupStat{e.at("mu").get<double>(), e.at("lam").get<double>(),
                                     e.at("sup_ratio").get<double>(),
                                     e.at("median_ratio").get<double>(),
                                     e.at("count").get<int>()});
  if (s.contains("config")) rep.config = config_from_json(s.at("config"));
  return rep;
}

// Parse the CSV produced by to_csv back into records (header validated).
inline std::vector<EstimateRecord> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::invalid_argument("records_from_csv: bad header");
  std::vector<EstimateRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 10) throw std::invalid_argument("records_from_csv: bad row: " + line);
    EstimateRecord r;
    r.n = std::stoi(cells[0]);
    r.N = std::stoi(cells[1]);
    r.L = std::stod(cells[2]);
    r.nullform = cells[3];
    r.mu = std::stod(cells[4]);
    r.lam = std::stod(cells[5]);
    r.seed = std::stoull(cells[6]);
    r.lhs = std::stod(cells[7]);
    r.rhs = std::stod(cells[8]);
    r.ratio = std::stod(cells[9]);
    out.push_back(std::move(r));
  }
  if (out.empty()) throw std::invalid_argument("records_from_csv: no records");
  return out;
}

// Write the report in the requested format; "" or "-" writes to stdout.
inline void emit_report(const EstimateReport& report, const std::string& format,
                        const std::string& path) {
  std::string payload;
  if (format == "csv") {
    payload = to_csv(report);
  } else if (format == "json") {
    payload = to_json(report).dump(2);
    payload += '\n';
  } else {
    throw std::invalid_argument("emit_report: format must be csv or json");
  }
  if (path.empty() || path == "-") {
    std::cout << payload;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_report: cannot open " + path);
  out << payload;
  if (!out) throw std::runtime_error("emit_report: write failed: " + path);
}

}  // namespace nullform
