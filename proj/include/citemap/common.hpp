#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace citemap {

/// The four macro areas book chapters are grouped into.
enum class Discipline { ArtsHumanities, Science, SocialSciences, EngineeringTechnology };

inline constexpr std::array<Discipline, 4> kAllDisciplines = {
    Discipline::ArtsHumanities, Discipline::Science, Discipline::SocialSciences,
    Discipline::EngineeringTechnology};

/// Short file-format code: AH, SCI, SOC, ET.
std::string_view discipline_code(Discipline d);
std::string_view discipline_name(Discipline d);
std::optional<Discipline> parse_discipline_code(std::string_view code);

/// A statistics scope: one discipline, or the whole corpus when empty.
using Scope = std::optional<Discipline>;

std::string scope_label(const Scope& scope);

/// Bad or inconsistent input data. CLI exit status 1.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad invocation or configuration. CLI exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-fatal problem tied to an input location. line == 0 means "whole source".
struct Diagnostic {
  std::string source;
  std::size_t line = 0;
  std::string message;

  std::string to_string() const;
  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// Shortest round-trippable decimal text for a double ("C" locale independent).
std::string format_double(double v);

/// Fixed-point text with the given number of decimals.
std::string format_fixed(double v, int decimals);

}  // namespace citemap
