#include "coord/io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "coord/text.hpp"

namespace coord::io {

using nlohmann::json;

namespace {

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

}  // namespace

InstanceSet read_instances(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (text::trim(line).empty()) continue;
    header = text::split(line, ',');
    break;
  }
  if (header.empty()) throw Error(source + ": missing header 'item,v1,...,vr'");
  if (text::trim(header[0]) != "item" || header.size() < 2) {
    throw Error(where(source, lineno) + ": header must be 'item,v1,...,vr'");
  }
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (text::trim(header[c]).empty()) {
      throw Error(where(source, lineno) + ": empty column name in column " + std::to_string(c + 1));
    }
  }
  const std::size_t r = header.size() - 1;
  InstanceSet data(r);
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (text::trim(line).empty()) continue;
    const auto cells = text::split(line, ',');
    if (cells.size() != header.size()) {
      throw Error(where(source, lineno) + ": expected " + std::to_string(header.size()) +
                  " cells, found " + std::to_string(cells.size()));
    }
    const std::string id = text::trim(cells[0]);
    if (id.empty()) throw Error(where(source, lineno) + ": empty item id");
    if (data.index_of(id) >= 0) {
      throw Error(where(source, lineno) + ": duplicate item id '" + id + "'");
    }
    std::vector<double> values;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const std::string cell = where(source, lineno) + " column " + std::to_string(c + 1) + " (" +
                               text::trim(header[c]) + ")";
      double x = 0.0;
      try {
        x = text::parse_double(cells[c]);
      } catch (const Error&) {
        throw Error(cell + ": malformed value '" + text::trim(cells[c]) + "'");
      }
      if (!std::isfinite(x)) throw Error(cell + ": value must be finite");
      if (x < 0.0) throw Error(cell + ": negative value " + text::trim(cells[c]));
      values.push_back(x);
    }
    data.add(id, DataVector(std::move(values)));
  }
  return data;
}

InstanceSet read_instances_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_instances(in, path);
}

void write_instances(std::ostream& out, const InstanceSet& data) {
  out << "item";
  for (std::size_t i = 0; i < data.instances(); ++i) out << ",v" << i + 1;
  out << '\n';
  for (std::size_t h = 0; h < data.items(); ++h) {
    out << data.id(h);
    for (double x : data.row(h).values()) out << ',' << text::format_double(x);
    out << '\n';
  }
}

namespace {

TauMap parse_pwl(std::string_view body) {
  PiecewiseTau p;
  for (const std::string& knot : text::split(body, ',')) {
    const auto at = knot.find('@');
    if (at == std::string::npos) throw Error("piecewise knot '" + knot + "' must read u@tau");
    p.u.push_back(text::parse_double(knot.substr(0, at)));
    p.tau.push_back(text::parse_double(knot.substr(at + 1)));
  }
  return TauMap(std::move(p));
}

std::vector<TauMap> parse_inline(std::string_view spec, std::size_t r) {
  const std::string s = text::trim(spec);
  std::vector<TauMap> maps;
  if (s.rfind("pps:", 0) == 0) {
    const auto [name, params] = text::split_kind(s);
    if (params.size() != 1 || params[0].first != "tau") {
      throw Error("pps scheme expects 'pps:tau=T' or 'pps:tau=T1/T2/...'");
    }
    for (const std::string& t : text::split(params[0].second, '/')) {
      maps.emplace_back(PpsTau{text::parse_double(t)});
    }
  } else if (s.rfind("pwl:", 0) == 0) {
    for (const std::string& inst : text::split(std::string_view(s).substr(4), '|')) {
      maps.push_back(parse_pwl(text::trim(inst)));
    }
  } else {
    throw Error("unknown scheme '" + s + "'");
  }
  if (maps.size() == 1 && r > 1) maps.resize(r, maps.front());
  if (maps.size() != r) {
    throw Error("scheme '" + s + "' lists " + std::to_string(maps.size()) +
                " instances, data has " + std::to_string(r));
  }
  return maps;
}

bool is_inline(std::string_view spec) {
  const std::string s = text::trim(spec);
  return s.rfind("pps:", 0) == 0 || s.rfind("pwl:", 0) == 0;
}

}  // namespace

TauScheme parse_scheme(std::string_view spec, std::size_t r) {
  if (r == 0) throw Error("scheme needs at least one instance");
  if (is_inline(spec)) return TauScheme(parse_inline(spec, r));
  return read_scheme_file(text::trim(spec), r);
}

TauScheme read_scheme_config(std::istream& in, std::size_t r, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<TauMap> fallback;
  std::vector<std::optional<TauMap>> per(r);
  while (std::getline(in, line)) {
    ++lineno;
    line = text::trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(where(source, lineno) + ": expected key = value");
    const std::string key = text::trim(line.substr(0, eq));
    const std::string value = text::trim(line.substr(eq + 1));
    try {
      if (key == "instances") {
        if (text::parse_double(value) != static_cast<double>(r)) {
          throw Error("config declares " + value + " instances, data has " + std::to_string(r));
        }
      } else if (key == "default") {
        fallback = parse_inline(value, 1).front();
      } else if (key.rfind("instance.", 0) == 0) {
        const double k = text::parse_double(key.substr(9));
        if (k < 1 || k > static_cast<double>(r) || k != std::floor(k)) {
          throw Error("instance index out of range in '" + key + "'");
        }
        per[static_cast<std::size_t>(k) - 1] = parse_inline(value, 1).front();
      } else {
        throw Error("unknown key '" + key + "'");
      }
    } catch (const Error& e) {
      throw Error(where(source, lineno) + ": " + e.what());
    }
  }
  std::vector<TauMap> maps;
  for (std::size_t i = 0; i < r; ++i) {
    if (per[i]) maps.push_back(*per[i]);
    else if (fallback) maps.push_back(*fallback);
    else throw Error(source + ": no threshold map for instance " + std::to_string(i + 1));
  }
  return TauScheme(std::move(maps));
}

TauScheme read_scheme_file(const std::string& path, std::size_t r) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scheme file '" + path + "'");
  return read_scheme_config(in, r, path);
}

std::string scheme_to_string(const TauScheme& scheme) {
  double common = 0.0;
  if (scheme.common_pps(&common)) return "pps:tau=" + text::format_double(common);
  bool all_pps = true;
  for (std::size_t i = 0; i < scheme.size(); ++i) all_pps = all_pps && scheme.map(i).is_pps();
  std::string out;
  if (all_pps) {
    for (std::size_t i = 0; i < scheme.size(); ++i) {
      out += (i ? "/" : "") + text::format_double(scheme.map(i).tau_star());
    }
    return "pps:tau=" + out;
  }
  for (std::size_t i = 0; i < scheme.size(); ++i) {
    const TauMap& m = scheme.map(i);
    if (i) out += '|';
    if (m.is_pps()) {
      out += "0@0,1@" + text::format_double(m.tau_star());
      continue;
    }
    const PiecewiseTau& p = *m.piecewise();
    for (std::size_t k = 0; k < p.u.size(); ++k) {
      out += (k ? "," : "") + text::format_double(p.u[k]) + "@" + text::format_double(p.tau[k]);
    }
  }
  return "pwl:" + out;
}

namespace {

std::string json_string(const std::string& s) { return json(s).dump(); }

double number_or_inf(const json& j) {
  if (j.is_string()) return text::parse_double(j.get<std::string>());
  return j.get<double>();
}

json finite_or_text(double x) {
  if (std::isfinite(x)) return x;
  return text::format_double(x);
}

}  // namespace

std::string sample_to_json(const ItemSample& s, bool with_tau) {
  std::string out = "{\"item\":" + json_string(s.id) +
                    ",\"seed\":" + text::format_double(s.outcome.seed.value()) + ",\"slots\":[";
  for (std::size_t i = 0; i < s.outcome.slots.size(); ++i) {
    const Slot& slot = s.outcome.slots[i];
    out += i ? "," : "";
    out += slot.known ? "{\"known\":" : "{\"unknown_ub\":";
    out += text::format_double(slot.value) + "}";
  }
  out += "]";
  if (with_tau) {
    out += ",\"tau\":[";
    for (std::size_t i = 0; i < s.scheme.size(); ++i) {
      out += (i ? "," : "") + text::format_double(s.scheme.map(i).tau_star());
    }
    out += "]";
  }
  return out + "}";
}

ItemSample sample_from_json(std::string_view line, const TauScheme& scheme) {
  ItemSample s;
  try {
    const json j = json::parse(line);
    s.id = j.at("item").get<std::string>();
    s.outcome.seed = Seed(j.at("seed").get<double>());
    for (const json& slot : j.at("slots")) {
      if (slot.contains("known")) s.outcome.slots.push_back(Slot::sampled(slot["known"].get<double>()));
      else s.outcome.slots.push_back(Slot::unknown(slot.at("unknown_ub").get<double>()));
    }
    if (j.contains("tau")) {
      s.scheme = TauScheme::pps(j["tau"].get<std::vector<double>>());
    } else {
      s.scheme = scheme;
    }
  } catch (const json::exception& e) {
    throw Error(std::string("malformed sample record: ") + e.what());
  }
  if (s.outcome.slots.size() != s.scheme.size()) {
    throw Error("sample record for '" + s.id + "' does not match the scheme arity");
  }
  return s;
}

void write_samples(std::ostream& out, const std::vector<ItemSample>& samples, bool with_tau) {
  for (const ItemSample& s : samples) out << sample_to_json(s, with_tau) << '\n';
}

std::vector<ItemSample> read_samples(std::istream& in, const TauScheme& scheme) {
  std::vector<ItemSample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(sample_from_json(line, scheme));
    } catch (const Error& e) {
      throw Error("sample line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string query_result_to_json(const QueryResult& r) {
  json j;
  j["query"] = r.query;
  j["estimator"] = r.estimator;
  j["items"] = r.items;
  j["estimate"] = finite_or_text(r.estimate);
  json contributions = json::array();
  for (const Contribution& c : r.contributions) {
    contributions.push_back({{"item", c.id}, {"value", finite_or_text(c.value)}});
  }
  j["contributions"] = std::move(contributions);
  return j.dump();
}

QueryResult query_result_from_json(std::string_view line) {
  try {
    const json j = json::parse(line);
    QueryResult r;
    r.query = j.at("query").get<std::string>();
    r.estimator = j.at("estimator").get<std::string>();
    r.items = j.at("items").get<std::string>();
    r.estimate = number_or_inf(j.at("estimate"));
    for (const json& c : j.at("contributions")) {
      r.contributions.push_back({c.at("item").get<std::string>(), number_or_inf(c.at("value"))});
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed query record: ") + e.what());
  }
}

std::string report_to_json(const AnalysisReport& r) {
  json j;
  j["function"] = r.function;
  j["scheme"] = r.scheme;
  j["vector"] = r.vector;
  j["f_value"] = finite_or_text(r.f_value);
  j["square_integral_j"] = finite_or_text(r.square_integral_j);
  j["square_integral_opt"] = finite_or_text(r.square_integral_opt);
  j["ratio"] = finite_or_text(r.ratio);
  j["ratio_upper"] = finite_or_text(r.ratio_upper);
  j["j_tail_bound"] = finite_or_text(r.j_tail_bound);
  j["variance_j"] = finite_or_text(r.variance_j);
  j["variance_opt"] = finite_or_text(r.variance_opt);
  j["estimable"] = r.estimable;
  j["finite_variance"] = r.finite_variance;
  j["bounded"] = r.bounded;
  j["gap"] = finite_or_text(r.gap);
  j["slope_sup"] = finite_or_text(r.slope_sup);
  j["variance_integral"] = finite_or_text(r.variance_integral);
  j["consistent"] = r.consistent;
  return j.dump();
}

AnalysisReport report_from_json(std::string_view line) {
  try {
    const json j = json::parse(line);
    AnalysisReport r;
    r.function = j.at("function").get<std::string>();
    r.scheme = j.at("scheme").get<std::string>();
    r.vector = j.at("vector").get<std::string>();
    r.f_value = number_or_inf(j.at("f_value"));
    r.square_integral_j = number_or_inf(j.at("square_integral_j"));
    r.square_integral_opt = number_or_inf(j.at("square_integral_opt"));
    r.ratio = number_or_inf(j.at("ratio"));
    r.ratio_upper = number_or_inf(j.at("ratio_upper"));
    r.j_tail_bound = number_or_inf(j.at("j_tail_bound"));
    r.variance_j = number_or_inf(j.at("variance_j"));
    r.variance_opt = number_or_inf(j.at("variance_opt"));
    r.estimable = j.at("estimable").get<bool>();
    r.finite_variance = j.at("finite_variance").get<bool>();
    r.bounded = j.at("bounded").get<bool>();
    r.gap = number_or_inf(j.at("gap"));
    r.slope_sup = number_or_inf(j.at("slope_sup"));
    r.variance_integral = number_or_inf(j.at("variance_integral"));
    r.consistent = j.at("consistent").get<bool>();
    return r;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed analysis record: ") + e.what());
  }
}

}  // namespace coord::io
