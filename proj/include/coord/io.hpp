#pragma once

// Flat-file formats: instance CSV, scheme specs and config files, JSON-lines
// sample records, and query/analysis report records.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "coord/analysis.hpp"
#include "coord/estimators.hpp"
#include "coord/samplers.hpp"

namespace coord::io {

/// CSV with header `item,v1,...,vr` and one row per item. Errors name the
/// line and column of the offending cell.
InstanceSet read_instances(std::istream& in, const std::string& source = "<input>");
InstanceSet read_instances_file(const std::string& path);
void write_instances(std::ostream& out, const InstanceSet& data);

/// Inline specs:
///   pps:tau=4            common tau_star for all r instances
///   pps:tau=4/2          one tau_star per instance
///   pwl:0@0,0.5@1,1@4    piecewise knots u@tau; `|` separates instances
/// Anything else is read as a key-value config file (see read_scheme_config).
TauScheme parse_scheme(std::string_view spec, std::size_t r);

/// Config file lines `key = value`, `#` starts a comment:
///   instances = 2
///   default = pps:tau=4
///   instance.2 = pwl:0@0,1@3
/// `default` applies to every instance without its own line.
TauScheme read_scheme_config(std::istream& in, std::size_t r, const std::string& source);
TauScheme read_scheme_file(const std::string& path, std::size_t r);

/// Inverse of parse_scheme for inline specs.
std::string scheme_to_string(const TauScheme& scheme);

/// {"item":..,"seed":..,"slots":[{"known":v}|{"unknown_ub":b}],"tau":[..]}
/// with 17 significant digits; "tau" is written for per-item PPS schemes
/// (bottom-k) when `with_tau` is set.
std::string sample_to_json(const ItemSample& s, bool with_tau = false);

/// Parses one record. Records without "tau" use `scheme`.
ItemSample sample_from_json(std::string_view line, const TauScheme& scheme);

void write_samples(std::ostream& out, const std::vector<ItemSample>& samples,
                   bool with_tau = false);
std::vector<ItemSample> read_samples(std::istream& in, const TauScheme& scheme);

std::string query_result_to_json(const QueryResult& r);
QueryResult query_result_from_json(std::string_view line);

std::string report_to_json(const AnalysisReport& r);
AnalysisReport report_from_json(std::string_view line);

}  // namespace coord::io
