#pragma once

// Small parsing/formatting helpers shared by the option-string parsers and the
// record writers.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace coord::text {

/// Splits `name:k1=v1,k2=v2` into the name and its key/value parameters.
std::pair<std::string, std::vector<std::pair<std::string, std::string>>> split_kind(
    std::string_view spec);

std::vector<std::string> split(std::string_view s, char sep);
std::string trim(std::string_view s);

/// Strict decimal parse; throws coord::Error on trailing garbage.
double parse_double(std::string_view s);

/// Round-trip decimal with 17 significant digits.
std::string format_double(double x);

}  // namespace coord::text
