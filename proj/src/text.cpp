#include "coord/text.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "coord/core.hpp"

namespace coord::text {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::pair<std::string, std::vector<std::pair<std::string, std::string>>> split_kind(
    std::string_view spec) {
  const std::string s = trim(spec);
  const std::size_t colon = s.find(':');
  std::pair<std::string, std::vector<std::pair<std::string, std::string>>> out;
  out.first = s.substr(0, colon);
  if (colon == std::string::npos) return out;
  for (const std::string& part : split(std::string_view(s).substr(colon + 1), ',')) {
    const std::size_t eq = part.find('=');
    if (eq == std::string::npos) throw Error("expected key=value in '" + s + "'");
    out.second.emplace_back(trim(part.substr(0, eq)), trim(part.substr(eq + 1)));
  }
  return out;
}

double parse_double(std::string_view s) {
  const std::string t = trim(s);
  if (t.empty()) throw Error("empty number");
  char* end = nullptr;
  const double x = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) throw Error("malformed number '" + t + "'");
  return x;
}

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace coord::text
