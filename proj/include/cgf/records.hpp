#pragma once

// CRI records as JSON Lines: one object per line with keys
//   protocol, n, slots, winner (id or null), winner_distance, winner_progress
//   (number or null), backoff, trace (symbols I/S/C, one per slot).

#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cgf/protocol.hpp"

namespace cgf {

inline nlohmann::ordered_json to_json(const CriRecord& r) {
  nlohmann::ordered_json j;
  j["protocol"] = std::string(to_string(r.protocol));
  j["n"] = r.n;
  j["slots"] = r.slots;
  j["winner"] = r.winner ? nlohmann::ordered_json(*r.winner) : nlohmann::ordered_json(nullptr);
  j["winner_distance"] = std::isnan(r.winner_distance) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.winner_distance);
  j["winner_progress"] = std::isnan(r.winner_progress) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.winner_progress);
  j["backoff"] = r.backoff;
  j["trace"] = trace_symbols(r.trace);
  return j;
}

inline CriRecord record_from_json(const nlohmann::json& j) {
  CriRecord r;
  r.protocol = parse_algorithm(j.at("protocol").get<std::string>());
  r.n = j.at("n").get<int>();
  r.slots = j.at("slots").get<int>();
  if (!j.at("winner").is_null()) r.winner = j.at("winner").get<int>();
  if (!j.at("winner_distance").is_null()) r.winner_distance = j.at("winner_distance").get<double>();
  if (!j.at("winner_progress").is_null()) r.winner_progress = j.at("winner_progress").get<double>();
  r.backoff = j.at("backoff").get<bool>();
  r.trace = parse_trace(j.at("trace").get<std::string>());
  return r;
}

inline void write_record(std::ostream& os, const CriRecord& r) { os << to_json(r).dump() << '\n'; }

inline std::vector<CriRecord> read_records(std::istream& is) {
  std::vector<CriRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    out.push_back(record_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

}  // namespace cgf
