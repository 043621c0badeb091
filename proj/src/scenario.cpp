#include "qgkd/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <stdexcept>

#include "qgkd/generators.hpp"

extern "C" char** environ;

namespace qgkd {

namespace {

using nlohmann::json;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void bad_field(const std::string& field, const std::string& detail) {
  throw std::invalid_argument("config field '" + field + "': " + detail);
}

Regime parse_regime(const std::string& name, bool& general) {
  const std::string n = lower(name);
  general = false;
  if (n == "general") { general = true; return Regime::NonEntangled; }
  if (n == "non-entangled") return Regime::NonEntangled;
  if (n == "max-entangled") return Regime::MaxEntangled;
  if (n == "partial-delta-zero") return Regime::PartialDeltaZero;
  if (n == "partial-gamma-zero") return Regime::PartialGammaZero;
  bad_field("regime", "unknown value '" + name + "'");
}

SymmetryCase parse_symmetry(const std::string& name) {
  const std::string n = lower(name);
  if (n == "case-i") return SymmetryCase::CaseI;
  if (n == "case-ii") return SymmetryCase::CaseII;
  if (n == "case-iii") return SymmetryCase::CaseIII;
  if (n == "partial-sym-i") return SymmetryCase::PartialSymI;
  if (n == "partial-sym-ii") return SymmetryCase::PartialSymII;
  if (n == "partial-sym-iii") return SymmetryCase::PartialSymIII;
  if (n == "none") return SymmetryCase::None;
  bad_field("symmetry", "unknown value '" + name + "'");
}

Disclosure::Variant parse_disclosure(const std::string& name) {
  const std::string n = lower(name);
  if (n == "payoffs-ab") return Disclosure::Variant::PayoffsAB;
  if (n == "alice-all") return Disclosure::Variant::AliceAll;
  if (n == "payoff-a-only") return Disclosure::Variant::PayoffAOnly;
  bad_field("disclosure", "unknown value '" + name + "'");
}

std::array<bool, 3> parse_qubit_set(const json& v, const std::string& field) {
  std::array<bool, 3> out{false, false, false};
  if (!v.is_array()) bad_field(field, "expected an array");
  // Either three booleans or a list of player letters ("A", "B", "C").
  if (v.size() == 3 && std::all_of(v.begin(), v.end(),
                                   [](const json& e) { return e.is_boolean(); })) {
    for (int i = 0; i < 3; ++i) out[i] = v[i].get<bool>();
    return out;
  }
  for (const auto& e : v) {
    if (!e.is_string()) bad_field(field, "expected player letters or three booleans");
    const std::string s = lower(e.get<std::string>());
    if (s == "a") out[0] = true;
    else if (s == "b") out[1] = true;
    else if (s == "c") out[2] = true;
    else bad_field(field, "unknown player '" + e.get<std::string>() + "'");
  }
  return out;
}

bool is_partial(Regime r) {
  return r == Regime::PartialDeltaZero || r == Regime::PartialGammaZero;
}

}  // namespace

double parse_angle(const std::string& text) {
  std::string t = text;
  t.erase(std::remove_if(t.begin(), t.end(),
                         [](unsigned char c) { return std::isspace(c); }),
          t.end());
  if (t.empty()) throw std::invalid_argument("empty angle literal");
  try {
    std::size_t used = 0;
    const double plain = std::stod(t, &used);
    if (used == t.size()) return plain;
  } catch (const std::exception&) {
  }
  static const std::regex form(R"(^([+-]?)((?:\d+\.?\d*)?)\*?pi(?:/(\d+\.?\d*))?$)",
                               std::regex::icase);
  std::smatch m;
  if (!std::regex_match(t, m, form))
    throw std::invalid_argument("unparseable angle literal '" + text + "'");
  double value = kPi;
  if (m[2].length() > 0) value *= std::stod(m[2].str());
  if (m[3].length() > 0) {
    const double denom = std::stod(m[3].str());
    if (denom == 0.0) throw std::invalid_argument("zero denominator in '" + text + "'");
    value /= denom;
  }
  if (m[1].str() == "-") value = -value;
  return value;
}

double parse_angle(const nlohmann::json& value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) return parse_angle(value.get<std::string>());
  throw std::invalid_argument("angle must be a number or a pi-literal string");
}

PayoffMatrix matrix_from_spec(const nlohmann::json& spec) {
  if (!spec.is_object()) bad_field("matrix", "expected an object");
  if (spec.contains("entries")) {
    const auto& rows = spec.at("entries");
    if (!rows.is_array() || rows.size() != 3)
      bad_field("matrix.entries", "expected 3 rows of 8 numbers");
    PayoffMatrix m;
    for (int k = 0; k < 3; ++k) {
      if (!rows[k].is_array() || rows[k].size() != 8)
        bad_field("matrix.entries", "expected 3 rows of 8 numbers");
      for (int lab = 0; lab < 8; ++lab) m.entries[k][lab] = rows[k][lab].get<double>();
    }
    if (!m.all_finite()) bad_field("matrix.entries", "non-finite entry");
    return m;
  }
  const std::string name = lower(spec.value("generator", std::string("generic")));
  Rng rng(spec.value("seed", std::uint64_t{1}));
  GeneratorOptions opt;
  opt.constrain_all_players = spec.value("constrain_all", opt.constrain_all_players);
  opt.min_gap = spec.value("min_gap", opt.min_gap);
  opt.entry_low = spec.value("entry_low", opt.entry_low);
  opt.entry_high = spec.value("entry_high", opt.entry_high);
  if (name == "not-dual") return generate_not_dual_matrix(rng, opt);
  if (name == "generic") return generate_generic_matrix(rng, opt);
  const SymmetryCase c = parse_symmetry(name);
  if (c == SymmetryCase::None) bad_field("matrix.generator", "unknown generator");
  return generate_case_matrix(c, rng, opt);
}

void apply_env_overrides(nlohmann::json& doc,
                         const std::map<std::string, std::string>& env) {
  const std::string prefix = "QGKD_";
  for (const auto& [key, value] : env) {
    if (key.rfind(prefix, 0) != 0) continue;
    std::string path = key.substr(prefix.size());
    if (path.empty()) continue;
    // "__" separates nesting levels; single underscores stay in field names.
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
      const std::size_t sep = path.find("__", pos);
      parts.push_back(lower(path.substr(pos, sep - pos)));
      if (sep == std::string::npos) break;
      pos = sep + 2;
    }
    json* node = &doc;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      if (!node->contains(parts[i]) || !(*node)[parts[i]].is_object())
        (*node)[parts[i]] = json::object();
      node = &(*node)[parts[i]];
    }
    json parsed = json::parse(value, nullptr, false);
    if (parsed.is_discarded()) parsed = value;
    (*node)[parts.back()] = parsed;
  }
}

ScenarioConfig parse_scenario(nlohmann::json doc,
                              const std::map<std::string, std::string>& env) {
  if (!doc.is_object()) throw std::invalid_argument("config root must be an object");
  apply_env_overrides(doc, env);

  ScenarioConfig out;
  SessionConfig& s = out.session;

  s.regime = parse_regime(doc.value("regime", std::string("non-entangled")),
                          out.general_regime);
  const bool partial = is_partial(s.regime);

  if (doc.contains("disclosure"))
    s.disclosure = parse_disclosure(doc.at("disclosure").get<std::string>());
  else
    s.disclosure = partial ? Disclosure::Variant::AliceAll : Disclosure::Variant::PayoffsAB;

  if (doc.contains("symmetry")) {
    s.symmetry = parse_symmetry(doc.at("symmetry").get<std::string>());
  } else if (partial) {
    s.symmetry = s.disclosure == Disclosure::Variant::PayoffAOnly
                     ? SymmetryCase::PartialSymII
                     : SymmetryCase::None;
  } else {
    s.symmetry = SymmetryCase::CaseI;
  }

  const std::string mode = lower(doc.value("mode", std::string("exact")));
  if (mode == "exact") s.mode = Mode::Exact;
  else if (mode == "sampled") s.mode = Mode::Sampled;
  else bad_field("mode", "expected 'exact' or 'sampled'");

  s.shots = doc.value("shots", s.shots);
  s.round_pairs = doc.value("round_pairs", s.round_pairs);
  s.max_retries = doc.value("max_retries", s.max_retries);
  if (doc.contains("codebook")) {
    const auto& cb = doc.at("codebook");
    s.codebook.strategy_bits = cb.value("strategy_bits", s.codebook.strategy_bits);
    s.codebook.payoff_digits = cb.value("payoff_digits", s.codebook.payoff_digits);
  }
  if (doc.contains("detection_sensitivity"))
    s.detection_sensitivity = doc.at("detection_sensitivity").get<double>();

  if (doc.contains("eavesdrop") && !doc.at("eavesdrop").is_null()) {
    const auto& ev = doc.at("eavesdrop");
    EavesdropConfig e;
    e.p = ev.value("p", 0.0);
    if (ev.contains("forward")) e.forward = parse_qubit_set(ev.at("forward"), "eavesdrop.forward");
    if (ev.contains("backward"))
      e.backward = parse_qubit_set(ev.at("backward"), "eavesdrop.backward");
    e.validate();
    s.eavesdrop = e;
  }

  json matrix_spec = doc.contains("matrix") ? doc.at("matrix") : json::object();
  if (!matrix_spec.contains("entries")) {
    if (!matrix_spec.contains("generator")) {
      // Pick the generator matching the declared symmetry class.
      switch (s.symmetry) {
        case SymmetryCase::CaseI: matrix_spec["generator"] = "case-i"; break;
        case SymmetryCase::CaseII: matrix_spec["generator"] = "case-ii"; break;
        case SymmetryCase::CaseIII: matrix_spec["generator"] = "case-iii"; break;
        case SymmetryCase::PartialSymI: matrix_spec["generator"] = "partial-sym-i"; break;
        case SymmetryCase::PartialSymII: matrix_spec["generator"] = "partial-sym-ii"; break;
        case SymmetryCase::PartialSymIII: matrix_spec["generator"] = "partial-sym-iii"; break;
        case SymmetryCase::None:
          matrix_spec["generator"] = partial ? "not-dual" : "generic";
          break;
      }
    }
    if (!matrix_spec.contains("seed"))
      matrix_spec["seed"] = doc.value("seed", std::uint64_t{1});
  }
  s.matrix = matrix_from_spec(matrix_spec);
  // The maximally entangled session validates the case on the permuted matrix,
  // so a generated case matrix is stored pre-permuted (the map is an involution).
  const bool permute = matrix_spec.value(
      "permute", s.regime == Regime::MaxEntangled && !matrix_spec.contains("entries"));
  if (permute) s.matrix = symmetry_permute_matrix(s.matrix);
  doc["matrix"] = matrix_spec;  // echo the effective source, seed included

  out.seed = doc.value("seed", out.seed);
  out.out_dir = doc.value("out", out.out_dir);
  out.table_rows = doc.value("table_rows", out.table_rows);

  if (doc.contains("strategies") && !doc.at("strategies").is_null()) {
    const auto& st = doc.at("strategies");
    if (st.is_string()) {
      if (lower(st.get<std::string>()) != "grid")
        bad_field("strategies", "expected 'grid', {\"C\": [...]} or {\"theta\": [...]}");
    } else if (st.contains("C")) {
      std::array<double, 3> c{};
      for (int i = 0; i < 3; ++i) c[i] = st.at("C").at(i).get<double>();
      for (double v : c)
        if (!(v >= 0.0 && v <= 1.0)) bad_field("strategies.C", "C values must lie in [0, 1]");
      out.fixed_C = c;
    } else if (st.contains("theta")) {
      std::array<double, 3> c{};
      for (int i = 0; i < 3; ++i) {
        const double th = parse_angle(st.at("theta").at(i));
        const double half = std::cos(th / 2);
        c[i] = half * half;
      }
      out.fixed_C = c;
    } else {
      bad_field("strategies", "expected 'grid', {\"C\": [...]} or {\"theta\": [...]}");
    }
  }

  if (doc.contains("entanglement")) {
    const auto& en = doc.at("entanglement");
    out.entanglement = EntanglementConfig(parse_angle(en.at("gamma")),
                                          parse_angle(en.at("delta")));
  }

  doc.erase("out");  // a write location, not scenario substance: keep the echo stable
  out.echo = doc.dump();
  return out;
}

ScenarioConfig load_scenario(const std::string& path,
                             const std::map<std::string, std::string>& env) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config parse error in '" + path + "': " + e.what());
  }
  return parse_scenario(std::move(doc), env);
}

std::map<std::string, std::string> scenario_env_from_process() {
  std::map<std::string, std::string> out;
  for (char** p = environ; p && *p; ++p) {
    const std::string entry(*p);
    if (entry.rfind("QGKD_", 0) != 0) continue;
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos) continue;
    out[entry.substr(0, eq)] = entry.substr(eq + 1);
  }
  return out;
}

}  // namespace qgkd
