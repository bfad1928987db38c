#include "tmclab/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "tmclab/errors.hpp"

namespace tmc {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::InvalidInput, "scenario: " + what); }

Word parse_word(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) bad(field + " must be a nonempty array of symbols");
  Word w;
  for (const json& s : j) {
    if (!s.is_number_integer()) bad(field + " must hold integers");
    w.push_back(s.get<Symbol>());
  }
  return w;
}

Complex parse_complex(const json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  bad(field + " must be a number or [re, im]");
}

template <class T>
T get_or(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    bad(std::string("field ") + key + " has the wrong type");
  }
}

std::pair<Index, Index> parse_window(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    bad(field + " must be [lo, hi]");
  const Index lo = j[0].get<Index>(), hi = j[1].get<Index>();
  if (lo > hi) bad(field + " is empty");
  return {lo, hi};
}

}  // namespace

const Function& Scenario::function(const std::string& fname) const {
  const auto it = functions.find(fname);
  if (it == functions.end()) bad("no function named '" + fname + "'");
  return it->second;
}

Function parse_function(const json& desc) {
  if (!desc.is_object() || !desc.contains("side") || !desc.contains("terms")) bad("function needs side and terms");
  const std::string side = desc.at("side").is_string() ? desc.at("side").get<std::string>() : "";
  if (side != "stable" && side != "unstable") bad("side must be stable or unstable");
  Function f{side == "stable" ? Side::Stable : Side::Unstable, {}};
  if (!desc.at("terms").is_array()) bad("terms must be an array");
  for (const json& t : desc.at("terms")) {
    if (!t.contains("anchor") || !t.at("anchor").is_array() || t.at("anchor").size() != 2)
      bad("term anchor must be a pair of points");
    const json& an = t.at("anchor");
    if (!an[0].is_string() || !an[1].is_string()) bad("anchor points must be strings");
    const GroupoidElement anchor{Point::parse(an[0].get<std::string>()), Point::parse(an[1].get<std::string>()), f.side};
    const Index radius = get_or<Index>(t, "radius_exp", 0), time = get_or<Index>(t, "time", 0);
    Weight w{t.contains("coeff") ? parse_complex(t.at("coeff"), "coeff") : Complex(1.0), std::nullopt};
    if (t.contains("series")) {
      const json& s = t.at("series");
      SeriesWeight sw;
      sw.symbol = get_or<Symbol>(s, "symbol", 0);
      sw.from = get_or<Index>(s, "from", 0);
      sw.to = get_or<Index>(s, "to", -1);
      sw.ratio = get_or<double>(s, "ratio", 0.5);
      sw.coeff = s.contains("coeff") ? parse_complex(s.at("coeff"), "series coeff") : Complex(1.0);
      w.series = sw;
    }
    f.terms.push_back({make_bisection(anchor, radius, time), w});
  }
  return f;
}

json function_to_json(const Function& f) {
  json terms = json::array();
  for (const Term& t : f.terms) {
    json j{{"anchor", {t.set.anchor.first.str(), t.set.anchor.second.str()}},
           {"radius_exp", t.set.radius},
           {"time", t.set.time},
           {"coeff", {t.weight.constant.real(), t.weight.constant.imag()}}};
    if (t.weight.series) {
      const SeriesWeight& s = *t.weight.series;
      j["series"] = {{"symbol", s.symbol},
                     {"from", s.from},
                     {"to", s.to},
                     {"ratio", s.ratio},
                     {"coeff", {s.coeff.real(), s.coeff.imag()}}};
    }
    terms.push_back(std::move(j));
  }
  return {{"side", f.side == Side::Stable ? "stable" : "unstable"}, {"terms", std::move(terms)}};
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Scenario parse_scenario(const json& doc) {
  if (!doc.is_object()) bad("top level must be an object");
  Scenario sc;
  sc.source = doc;
  sc.hash = fnv1a_hex(doc.dump());
  sc.name = get_or<std::string>(doc, "name", "");
  if (!doc.contains("matrix")) bad("missing matrix");
  std::vector<std::vector<int>> rows;
  try {
    rows = doc.at("matrix").get<std::vector<std::vector<int>>>();
  } catch (const json::exception&) {
    bad("matrix must be a square 0/1 array");
  }
  for (const auto& r : rows) {
    if (r.size() != rows.size()) bad("matrix must be square");
    for (int v : r)
      if (v != 0 && v != 1) bad("matrix entries must be 0 or 1");
  }
  if (rows.empty()) bad("matrix is empty");
  sc.matrix = TransitionMatrix(rows);
  validate_matrix(sc.matrix);
  sc.metric.kappa = get_or<double>(doc, "kappa", 2.0);
  validate_params(sc.metric);
  if (!doc.contains("orbit_P") || !doc.contains("orbit_Q")) bad("missing orbit_P or orbit_Q");
  const Word pw = parse_word(doc.at("orbit_P"), "orbit_P"), qw = parse_word(doc.at("orbit_Q"), "orbit_Q");
  for (const Word* w : {&pw, &qw})
    for (Symbol s : *w)
      if (s < 0 || s >= sc.matrix.size()) bad("orbit symbol out of range");
  sc.p = PeriodicOrbit(pw, sc.matrix);
  sc.q = PeriodicOrbit(qw, sc.matrix);
  if (!orbits_disjoint(sc.p, sc.q)) throw Error(Errc::OrbitsNotDisjoint, "scenario: orbits P and Q coincide");
  sc.core_bound = get_or<int>(doc, "core_bound", sc.core_bound);
  if (sc.core_bound < 0) bad("core_bound must be nonnegative");
  if (doc.contains("window")) std::tie(sc.window_lo, sc.window_hi) = parse_window(doc.at("window"), "window");
  sc.basis_cap = get_or<std::size_t>(doc, "basis_cap", sc.basis_cap);
  if (sc.basis_cap == 0) bad("basis_cap must be positive");
  if (doc.contains("p_grid")) sc.p_grid = get_or<std::vector<double>>(doc, "p_grid", {});
  for (double p : sc.p_grid)
    if (!(p > 0)) bad("p_grid entries must be positive");
  sc.seed = get_or<std::uint64_t>(doc, "seed", sc.seed);
  sc.samples = get_or<std::uint64_t>(doc, "samples", sc.samples);
  if (doc.contains("functions")) {
    if (!doc.at("functions").is_object()) bad("functions must be an object");
    for (const auto& [fname, desc] : doc.at("functions").items()) {
      Function f = parse_function(desc);
      for (const Term& t : f.terms)
        if (!is_allowed(t.set.anchor.first, sc.matrix) || !is_allowed(t.set.anchor.second, sc.matrix))
          bad("function '" + fname + "' has an anchor point outside the shift");
      sc.functions.emplace(fname, std::move(f));
    }
  }
  if (doc.contains("spectrum")) {
    const json& s = doc.at("spectrum");
    sc.a_name = get_or<std::string>(s, "a", sc.a_name);
    sc.b_name = get_or<std::string>(s, "b", sc.b_name);
    const std::string kind = get_or<std::string>(s, "kind", "plain");
    if (kind != "plain" && kind != "mixed") bad("spectrum kind must be plain or mixed");
    sc.kind = kind == "plain" ? CommutatorKind::Plain : CommutatorKind::Mixed;
  }
  if (doc.contains("fredholm")) {
    const json& s = doc.at("fredholm");
    sc.e_name = get_or<std::string>(s, "projection", sc.e_name);
    if (s.contains("window")) std::tie(sc.fredholm_lo, sc.fredholm_hi) = parse_window(s.at("window"), "fredholm window");
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

}  // namespace tmc
