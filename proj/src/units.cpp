#include "dnpsim/units.hpp"

#include "dnpsim/errors.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <utility>

namespace dnpsim {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::pair<double, std::string> split_number(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr == text.data()) {
    throw ConfigError("cannot parse quantity '" + std::string(text) + "'");
  }
  if (!std::isfinite(value)) {
    throw ConfigError("non-finite quantity '" + std::string(text) + "'");
  }
  std::string_view unit = trim(text.substr(static_cast<std::size_t>(ptr - text.data())));
  return {value, std::string(unit)};
}

const std::map<std::string, double, std::less<>>& unit_table(Dimension dim) {
  using constants::two_pi;
  static const std::map<std::string, double, std::less<>> frequency{
      {"Hz", two_pi},        {"kHz", two_pi * 1e3}, {"MHz", two_pi * 1e6},
      {"GHz", two_pi * 1e9}, {"rad/s", 1.0},        {"krad/s", 1e3},
      {"Mrad/s", 1e6},
  };
  static const std::map<std::string, double, std::less<>> rate{
      {"s^-1", 1.0}, {"/s", 1.0}, {"1/s", 1.0}, {"ms^-1", 1e3}, {"us^-1", 1e6},
  };
  static const std::map<std::string, double, std::less<>> time{
      {"s", 1.0},    {"ms", 1e-3},  {"us", 1e-6},    {"µs", 1e-6},
      {"ns", 1e-9},  {"min", 60.0}, {"h", 3600.0},
  };
  static const std::map<std::string, double, std::less<>> field{{"T", 1.0}, {"mT", 1e-3}};
  static const std::map<std::string, double, std::less<>> temperature{{"K", 1.0}, {"mK", 1e-3}};
  static const std::map<std::string, double, std::less<>> length{
      {"A", 1.0}, {"Å", 1.0}, {"angstrom", 1.0}, {"nm", 10.0}, {"pm", 1e-2},
  };
  static const std::map<std::string, double, std::less<>> angle{
      {"rad", 1.0}, {"deg", std::numbers::pi / 180.0}, {"°", std::numbers::pi / 180.0},
  };
  switch (dim) {
    case Dimension::Frequency: return frequency;
    case Dimension::Rate: return rate;
    case Dimension::Time: return time;
    case Dimension::Field: return field;
    case Dimension::Temperature: return temperature;
    case Dimension::Length: return length;
    case Dimension::Angle: return angle;
  }
  return frequency;
}

const char* dimension_name(Dimension dim) {
  switch (dim) {
    case Dimension::Frequency: return "frequency";
    case Dimension::Rate: return "rate";
    case Dimension::Time: return "time";
    case Dimension::Field: return "field";
    case Dimension::Temperature: return "temperature";
    case Dimension::Length: return "length";
    case Dimension::Angle: return "angle";
  }
  return "?";
}

}  // namespace

double nuclear_gamma(std::string_view label) {
  if (label == "1H" || label == "H1") return constants::gamma_1H;
  if (label == "13C" || label == "C13") return constants::gamma_13C;
  throw DomainError("unknown nucleus '" + std::string(label) + "' (known: 1H, 13C)");
}

double parse_quantity(std::string_view text, Dimension dim) {
  auto [value, unit] = split_number(text);
  if (unit.empty()) {
    throw ConfigError("quantity '" + std::string(trim(text)) + "' needs an explicit " +
                      dimension_name(dim) + " unit");
  }
  const auto& table = unit_table(dim);
  auto it = table.find(unit);
  if (it == table.end()) {
    throw ConfigError("unit '" + unit + "' is not a " + dimension_name(dim) + " unit");
  }
  return value * it->second;
}

double parse_rate_or_time(std::string_view text) {
  auto [value, unit] = split_number(text);
  const auto& rates = unit_table(Dimension::Rate);
  if (auto it = rates.find(unit); it != rates.end()) return value * it->second;
  const auto& times = unit_table(Dimension::Time);
  if (auto it = times.find(unit); it != times.end()) {
    const double seconds = value * it->second;
    if (seconds <= 0.0) throw ConfigError("relaxation time must be positive: '" + std::string(text) + "'");
    return 1.0 / seconds;
  }
  throw ConfigError("'" + std::string(trim(text)) + "' is neither a rate (s^-1) nor a time");
}

}  // namespace dnpsim
