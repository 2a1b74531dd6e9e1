#pragma once

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "truchet/construct.hpp"
#include "truchet/params.hpp"
#include "truchet/symbolic.hpp"
#include "truchet/tiling.hpp"
#include "truchet/version.hpp"

namespace truchet::io {

using json = nlohmann::ordered_json;

/// FNV-1a 64-bit; used to fingerprint the effective configuration in reports.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Fixed 15-digit decimal rendering for report columns.
inline std::string decimal15(const Scalar& v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v.to_double());
  return buf;
}

inline json itinerary_to_json(const params::Itinerary& it) {
  json branches = json::array();
  for (const params::Branch& b : it.branches) branches.push_back({b.n.str(), b.r});
  json j;
  j["branches"] = std::move(branches);
  j["boundary"] = it.boundary;
  if (it.tail_zero) j["tail_zero"] = true;
  return j;
}

inline params::Itinerary itinerary_from_json(const json& j) {
  params::Itinerary it;
  for (const auto& b : j.at("branches")) {
    BigInt n = b.at(0).is_string() ? BigInt(b.at(0).get<std::string>())
                                   : BigInt(b.at(0).get<long long>());
    it.branches.emplace_back(n, b.at(1).get<int>());
  }
  it.boundary = j.value("boundary", false);
  it.tail_zero = j.value("tail_zero", false);
  return it;
}

/// Window dump {"omega": [...], "eta": [...], "base": [lo_m, lo_n]}.
inline json window_dump(const tiling::Tiling& t, long long mlo, long long mhi, long long nlo,
                        long long nhi) {
  json om = json::array(), et = json::array();
  for (long long m = mlo; m <= mhi; ++m) om.push_back(t.omega.at(m));
  for (long long n = nlo; n <= nhi; ++n) et.push_back(t.eta.at(n));
  json j;
  j["omega"] = std::move(om);
  j["eta"] = std::move(et);
  j["base"] = {mlo, nlo};
  return j;
}

inline tiling::Tiling tiling_from_window_json(const json& j) {
  std::vector<int> om = j.at("omega").get<std::vector<int>>();
  std::vector<int> et = j.at("eta").get<std::vector<int>>();
  long long lo_m = j.at("base").at(0).get<long long>();
  long long lo_n = j.at("base").at(1).get<long long>();
  return {tiling::SeqWindow::explicit_window(std::move(om), lo_m),
          tiling::SeqWindow::explicit_window(std::move(et), lo_n)};
}

/// Sequence-window dump with its backend descriptor.
inline json window_descriptor(const tiling::SeqWindow& w, long long lo, long long hi) {
  json j;
  if (w.is_rotation()) {
    j["backend"] = "rotation";
    j["alpha"] = w.alpha().str();
    j["base"] = w.base().str();
    j["offset"] = w.offset();
  } else {
    j["backend"] = w.is_periodic() ? "periodic" : "explicit";
  }
  json vals = json::array();
  for (long long i = lo; i <= hi; ++i) vals.push_back(w.at(i));
  j["window"] = std::move(vals);
  j["lo"] = lo;
  return j;
}

inline json state_dump(const symb::SymbolicState& st, long long lo, long long hi) {
  json j;
  j["omega"] = window_descriptor(st.omega, lo, hi);
  j["eta"] = window_descriptor(st.eta, lo, hi);
  j["v"] = {st.v.a, st.v.b};
  return j;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
}

}  // namespace truchet::io
