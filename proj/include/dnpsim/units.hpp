#pragma once

#include <numbers>
#include <string>
#include <string_view>

namespace dnpsim {

/// CODATA 2018 values, SI units.
namespace constants {
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double k_B = 1.380649e-23;            // J / K
inline constexpr double mu0_over_4pi = 1.00000000055e-7;  // T m / A
inline constexpr double gamma_e = 1.76085963023e11;    // rad / (s T), magnitude
inline constexpr double gamma_1H = 267.5221877e6;      // rad / (s T)
inline constexpr double gamma_13C = 67.2828284e6;      // rad / (s T)
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double angstrom = 1e-10;  // m
}  // namespace constants

/// Gyromagnetic ratio for a nucleus label ("1H", "13C"). Throws DomainError.
double nuclear_gamma(std::string_view label);

/// Physical dimension a quantity string is expected to carry.
enum class Dimension {
  Frequency,    // Hz-family (x 2 pi) or rad/s; result in rad/s
  Rate,         // s^-1; no 2 pi
  Time,         // s
  Field,        // T
  Temperature,  // K
  Length,       // angstrom
  Angle,        // rad
};

/// Parses "<number> <unit>" into the internal unit for `dim`.
///
/// Frequencies: Hz, kHz, MHz, GHz are linear and get multiplied by 2 pi;
/// "rad/s" is taken as angular. Rates: "s^-1", "/s", "1/s", "Hz" is NOT
/// accepted for rates. A bare number is rejected for every dimension.
/// Throws ConfigError on malformed input.
double parse_quantity(std::string_view text, Dimension dim);

/// Inverse time written as a relaxation time ("10 us") or a rate ("1e5 s^-1").
double parse_rate_or_time(std::string_view text);

}  // namespace dnpsim
