#pragma once

// CSV emission with fixed 17-significant-digit formatting, and the loader for
// tabulated frequency profiles (two columns `t,omega` with a header row; the
// first column is the slow argument eps t).

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pinney/error.hpp"
#include "pinney/frequency.hpp"
#include "pinney/ode.hpp"

namespace pinney {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv_row(std::ostream& os, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) os << ',';
    os << format_double(v);
    first = false;
  }
  os << '\n';
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,x,v\n";
  for (const auto& s : traj.samples) write_csv_row(os, {s.t, s.x, s.v});
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_number(std::string_view field, const std::string& where) {
  const std::string text(trim(field));
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  require(!text.empty() && end == text.c_str() + text.size(), ErrorCode::InvalidArgument,
          "not a number '" + text + "' " + where);
  return v;
}

}  // namespace detail

/// Parse `t,omega` rows (after the header) into a tabulated profile.
inline FrequencyProfile parse_tabulated_profile(std::istream& in, const std::string& name = "<stream>") {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::InvalidArgument, name + ": empty table");
  {
    const auto comma = line.find(',');
    require(comma != std::string::npos && detail::trim(std::string_view(line).substr(0, comma)) == "t" &&
                detail::trim(std::string_view(line).substr(comma + 1)) == "omega",
            ErrorCode::InvalidArgument, name + ": header must be 't,omega'");
  }
  std::vector<double> s, omega;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const auto comma = line.find(',');
    const std::string where = "at " + name + ":" + std::to_string(row);
    require(comma != std::string::npos && line.find(',', comma + 1) == std::string::npos, ErrorCode::InvalidArgument,
            "expected two columns " + where);
    s.push_back(detail::parse_number(std::string_view(line).substr(0, comma), where));
    omega.push_back(detail::parse_number(std::string_view(line).substr(comma + 1), where));
  }
  return FrequencyProfile::tabulated(std::move(s), std::move(omega));
}

inline FrequencyProfile load_tabulated_profile(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::InvalidArgument, "cannot open frequency table '" + path + "'");
  return parse_tabulated_profile(in, path);
}

/// `constant`, `decaying`, `growing`, `oscillating` or `tabulated:<path>`.
inline FrequencyProfile profile_from_name(std::string_view name, double omega0, double gamma) {
  if (name == "constant") return FrequencyProfile::constant(omega0);
  if (name == "decaying") return FrequencyProfile::decaying(omega0);
  if (name == "growing") return FrequencyProfile::growing(omega0);
  if (name == "oscillating") return FrequencyProfile::oscillating(omega0, gamma);
  constexpr std::string_view prefix = "tabulated:";
  if (name.substr(0, prefix.size()) == prefix) return load_tabulated_profile(std::string(name.substr(prefix.size())));
  fail(ErrorCode::InvalidArgument, "unknown frequency profile '" + std::string(name) + "'");
}

}  // namespace pinney
