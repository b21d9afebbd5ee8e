#pragma once

#include <map>
#include <string>
#include <vector>

#include "revuz/chain.hpp"
#include "revuz/measure.hpp"

namespace revuz {

// A named experiment setup: one chain, a dictionary of measures, an optional
// approximating measure family with its limit, optional nests, and default
// grids for the verification suites. Loaded from a JSON file; see
// scenarios/*.json for the format.
struct Scenario {
  std::string name;
  Chain chain;
  std::map<std::string, MeasureVec> measures;
  std::vector<MeasureVec> family;
  std::vector<std::string> family_labels;
  std::string family_limit;
  std::vector<std::vector<Index>> nests;
  std::vector<double> alpha_grid;
  std::vector<double> t_grid;
  std::vector<double> delta_grid;
  double horizon;
  double epsilon;
  Index x;

  const MeasureVec& measure(const std::string& key) const;
  const MeasureVec& limit_measure() const;
};

// Names of the scenario files shipped with the build (sorted stems of
// *.json in the built-in scenario directory).
std::vector<std::string> builtin_scenarios();

// Accepts either a path to a JSON file or the bare name of a built-in
// scenario. Throws IoError when nothing resolves, ParseError on bad content.
Scenario load_scenario(const std::string& name_or_path);

Scenario parse_scenario_text(const std::string& text,
                             const std::string& origin);

}  // namespace revuz
