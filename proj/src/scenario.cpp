#include "revuz/scenario.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#ifndef REVUZ_SCENARIO_DIR
#define REVUZ_SCENARIO_DIR "scenarios"
#endif

namespace revuz {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw ParseError(origin + ": " + what);
}

const json& field(const json& j, const char* key, const std::string& origin) {
  auto it = j.find(key);
  if (it == j.end()) fail(origin, std::string("missing field '") + key + "'");
  return *it;
}

double number_field(const json& j, const char* key,
                    const std::string& origin) {
  const json& v = field(j, key, origin);
  if (!v.is_number()) fail(origin, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

Index int_field(const json& j, const char* key, const std::string& origin) {
  const json& v = field(j, key, origin);
  if (!v.is_number_integer()) {
    fail(origin, std::string("field '") + key + "' must be an integer");
  }
  return v.get<Index>();
}

std::string string_field(const json& j, const char* key,
                         const std::string& origin) {
  const json& v = field(j, key, origin);
  if (!v.is_string()) fail(origin, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> number_array(const json& v, const std::string& origin,
                                 const char* what) {
  if (!v.is_array() || v.empty()) {
    fail(origin, std::string(what) + " must be a nonempty array of numbers");
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) fail(origin, std::string(what) + " must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Vector killing_vector(const json& v, const Chain& chain,
                      const std::string& origin) {
  Vector kill = Vector::Zero(chain.size());
  if (v.is_number()) {
    kill.setConstant(v.get<double>());
  } else if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (!it.value().is_number()) {
        fail(origin, "killing rates must be numbers");
      }
      kill(chain.index_of(it.key())) = it.value().get<double>();
    }
  } else {
    fail(origin, "killing must be a number or a {label: rate} object");
  }
  return kill;
}

Chain with_killing(const Chain& base, const Vector& kill) {
  Matrix q = base.generator();
  q.diagonal() -= kill;
  return Chain(base.labels(), base.m(), std::move(q));
}

Chain parse_chain(const json& j, const std::string& origin) {
  if (!j.is_object()) fail(origin, "chain must be an object");
  const std::string kind = string_field(j, "kind", origin);

  Chain chain = [&]() -> Chain {
    if (kind == "explicit") {
      const json& jstates = field(j, "states", origin);
      if (!jstates.is_array() || jstates.empty()) {
        fail(origin, "states must be a nonempty array of labels");
      }
      std::vector<std::string> labels;
      labels.reserve(jstates.size());
      for (const auto& s : jstates) {
        if (!s.is_string()) fail(origin, "states must contain only strings");
        labels.push_back(s.get<std::string>());
      }
      const Index n = static_cast<Index>(labels.size());

      std::vector<double> mvals =
          number_array(field(j, "m", origin), origin, "m");
      if (static_cast<Index>(mvals.size()) != n) {
        fail(origin, "m must have one entry per state");
      }
      Vector m = Eigen::Map<const Vector>(mvals.data(), n);

      Matrix q = Matrix::Zero(n, n);
      const json& jrates = field(j, "rates", origin);
      if (!jrates.is_array()) fail(origin, "rates must be an array of triplets");
      auto index_of = [&](const json& s) -> Index {
        if (!s.is_string()) fail(origin, "rate endpoints must be state labels");
        const std::string name = s.get<std::string>();
        auto it = std::find(labels.begin(), labels.end(), name);
        if (it == labels.end()) fail(origin, "unknown state label: " + name);
        return static_cast<Index>(it - labels.begin());
      };
      for (const auto& t : jrates) {
        if (!t.is_array() || t.size() != 3 || !t[2].is_number()) {
          fail(origin, "each rate must be [from, to, value]");
        }
        const Index from = index_of(t[0]);
        const Index to = index_of(t[1]);
        if (from == to) fail(origin, "rates must connect distinct states");
        if (q(from, to) != 0.0) {
          fail(origin, "duplicate rate entry " + labels[from] + " -> " +
                           labels[to]);
        }
        q(from, to) = t[2].get<double>();
      }
      for (Index i = 0; i < n; ++i) q(i, i) = -q.row(i).sum();
      return Chain(std::move(labels), std::move(m), std::move(q));
    }
    if (kind == "cycle") return cycle(int_field(j, "k", origin));
    if (kind == "path") return path(int_field(j, "k", origin));
    if (kind == "birth_death") {
      return birth_death(
          int_field(j, "k", origin),
          number_array(field(j, "up", origin), origin, "up"),
          number_array(field(j, "down", origin), origin, "down"));
    }
    if (kind == "reflected_bm") {
      const json& jint = field(j, "interval", origin);
      if (!jint.is_array() || jint.size() != 2 || !jint[0].is_number() ||
          !jint[1].is_number()) {
        fail(origin, "interval must be [a, b]");
      }
      return reflected_bm_discretization(int_field(j, "k", origin),
                                         jint[0].get<double>(),
                                         jint[1].get<double>());
    }
    fail(origin, "unknown chain kind '" + kind + "'");
  }();

  if (auto it = j.find("killing"); it != j.end()) {
    chain = with_killing(chain, killing_vector(*it, chain, origin));
  }
  return chain;
}

MeasureVec parse_measure(const json& v, const Chain& chain,
                         const std::string& origin) {
  if (!v.is_object()) fail(origin, "a measure must be a {label: mass} object");
  Vector w = Vector::Zero(chain.size());
  for (auto it = v.begin(); it != v.end(); ++it) {
    if (!it.value().is_number()) fail(origin, "measure masses must be numbers");
    w(chain.index_of(it.key())) = it.value().get<double>();
  }
  return make_measure(chain, std::move(w));
}

std::string trimmed_number(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

void parse_family(const json& j, Scenario& sc, const std::string& origin) {
  const std::string kind = string_field(j, "kind", origin);
  if (kind == "mollified_dirac") {
    const Index center = sc.chain.index_of(string_field(j, "center", origin));
    const json& jw = field(j, "widths", origin);
    if (!jw.is_array() || jw.empty()) {
      fail(origin, "widths must be a nonempty array of odd integers");
    }
    std::vector<Index> widths;
    for (const auto& e : jw) {
      if (!e.is_number_integer()) fail(origin, "widths must be integers");
      widths.push_back(e.get<Index>());
    }
    sc.family = mollified_dirac(sc.chain, center, widths);
    for (Index w : widths) sc.family_labels.push_back("w" + std::to_string(w));
    if (sc.family_limit.empty()) {
      sc.measures.emplace("family-limit", dirac(sc.chain, center));
      sc.family_limit = "family-limit";
    }
    return;
  }
  if (kind == "scaled" || kind == "perturbed") {
    const std::string base = string_field(j, "base", origin);
    auto it = sc.measures.find(base);
    if (it == sc.measures.end()) {
      fail(origin, "family base '" + base + "' is not a declared measure");
    }
    if (kind == "scaled") {
      std::vector<double> factors =
          number_array(field(j, "factors", origin), origin, "factors");
      sc.family = scaled(it->second, factors);
      for (double f : factors) sc.family_labels.push_back("c" + trimmed_number(f));
    } else {
      const auto seed =
          static_cast<std::uint64_t>(int_field(j, "noise_seed", origin));
      Index count = 8;
      if (j.contains("count")) count = int_field(j, "count", origin);
      sc.family = perturbed(it->second, seed, count);
      for (Index k = 0; k < count; ++k) {
        sc.family_labels.push_back("p" + std::to_string(k));
      }
    }
    if (sc.family_limit.empty()) sc.family_limit = base;
    return;
  }
  fail(origin, "unknown family kind '" + kind + "'");
}

}  // namespace

const MeasureVec& Scenario::measure(const std::string& key) const {
  auto it = measures.find(key);
  if (it == measures.end()) {
    throw ParseError("scenario '" + name + "' has no measure named '" + key +
                     "'");
  }
  return it->second;
}

const MeasureVec& Scenario::limit_measure() const {
  if (family_limit.empty()) {
    throw ParseError("scenario '" + name + "' declares no measure family");
  }
  return measure(family_limit);
}

std::vector<std::string> builtin_scenarios() {
  namespace fs = std::filesystem;
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(REVUZ_SCENARIO_DIR, ec)) {
    if (entry.path().extension() == ".json") {
      names.push_back(entry.path().stem().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

Scenario load_scenario(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  fs::path path(name_or_path);
  if (!fs::exists(path)) {
    const fs::path builtin =
        fs::path(REVUZ_SCENARIO_DIR) / (name_or_path + ".json");
    if (name_or_path.find('/') == std::string::npos && fs::exists(builtin)) {
      path = builtin;
    } else {
      throw IoError("no scenario file or built-in named '" + name_or_path +
                    "'");
    }
  }
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario_text(text.str(), path.string());
}

Scenario parse_scenario_text(const std::string& text,
                             const std::string& origin) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(origin, "not valid JSON");
  if (!j.is_object()) fail(origin, "top level must be an object");

  Scenario sc{string_field(j, "name", origin),
              parse_chain(field(j, "chain", origin), origin),
              {},
              {},
              {},
              {},
              {},
              {0.25, 1.0, 4.0},
              {0.5, 1.0, 2.0},
              {0.5, 0.25, 0.125, 0.0625, 0.03125},
              1.0,
              0.05,
              0};

  if (auto it = j.find("measures"); it != j.end()) {
    if (!it->is_object()) fail(origin, "measures must be an object");
    for (auto m = it->begin(); m != it->end(); ++m) {
      sc.measures.emplace(m.key(), parse_measure(m.value(), sc.chain, origin));
    }
  }
  sc.measures.emplace("lebesgue", make_measure(sc.chain, sc.chain.m()));
  sc.measures.emplace("zero", zero_measure(sc.chain));

  if (auto it = j.find("family_limit"); it != j.end()) {
    if (!it->is_string()) fail(origin, "family_limit must be a measure name");
    sc.family_limit = it->get<std::string>();
    if (sc.measures.find(sc.family_limit) == sc.measures.end()) {
      fail(origin, "family_limit '" + sc.family_limit +
                       "' is not a declared measure");
    }
  }
  if (auto it = j.find("family"); it != j.end()) {
    parse_family(*it, sc, origin);
  }

  if (auto it = j.find("nests"); it != j.end()) {
    if (!it->is_array()) fail(origin, "nests must be an array of label lists");
    for (const auto& lst : *it) {
      if (!lst.is_array()) fail(origin, "each nest must be a list of labels");
      std::vector<Index> members;
      for (const auto& s : lst) {
        if (!s.is_string()) fail(origin, "nest members must be state labels");
        members.push_back(sc.chain.index_of(s.get<std::string>()));
      }
      sc.nests.push_back(canonical_subset(sc.chain, members));
    }
  }

  if (j.contains("alpha_grid")) {
    sc.alpha_grid = number_array(j["alpha_grid"], origin, "alpha_grid");
  }
  if (j.contains("t_grid")) {
    sc.t_grid = number_array(j["t_grid"], origin, "t_grid");
  }
  if (j.contains("delta_grid")) {
    sc.delta_grid = number_array(j["delta_grid"], origin, "delta_grid");
  }
  if (j.contains("horizon")) sc.horizon = number_field(j, "horizon", origin);
  if (j.contains("epsilon")) sc.epsilon = number_field(j, "epsilon", origin);
  if (!(sc.horizon > 0.0)) fail(origin, "horizon must be positive");
  if (!(sc.epsilon > 0.0)) fail(origin, "epsilon must be positive");
  if (j.contains("x")) sc.x = sc.chain.index_of(string_field(j, "x", origin));

  return sc;
}

}  // namespace revuz
