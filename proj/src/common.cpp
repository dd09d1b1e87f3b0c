#include "citemap/common.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace citemap {

std::string_view discipline_code(Discipline d) {
  switch (d) {
    case Discipline::ArtsHumanities: return "AH";
    case Discipline::Science: return "SCI";
    case Discipline::SocialSciences: return "SOC";
    case Discipline::EngineeringTechnology: return "ET";
  }
  return "?";
}

std::string_view discipline_name(Discipline d) {
  switch (d) {
    case Discipline::ArtsHumanities: return "Arts & Humanities";
    case Discipline::Science: return "Science";
    case Discipline::SocialSciences: return "Social Sciences";
    case Discipline::EngineeringTechnology: return "Engineering & Technology";
  }
  return "?";
}

std::optional<Discipline> parse_discipline_code(std::string_view code) {
  for (Discipline d : kAllDisciplines) {
    if (discipline_code(d) == code) return d;
  }
  return std::nullopt;
}

std::string scope_label(const Scope& scope) {
  return scope ? std::string(discipline_code(*scope)) : std::string("ALL");
}

std::string Diagnostic::to_string() const {
  std::string out = source;
  if (line > 0) out += ":" + std::to_string(line);
  out += ": " + message;
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_fixed(double v, int decimals) {
  if (!std::isfinite(v)) return format_double(v);
  char buf[128];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  if (res.ec != std::errc{}) return format_double(v);
  std::string s(buf, res.ptr);
  // -0.000 renders as 0.000 so output does not depend on the sign of tiny values
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

}  // namespace citemap
