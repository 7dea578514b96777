// Copyright 2026 The DQA Simulator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Experiment specs, runners and exporters behind the `dqa` tool.
//
// A spec is a flat JSON object:
//
//   {"schema_version": 1, "inputs": [1, 1, 1, 1], "n": "auto",
//    "kind": "dephasing", "half_p": 0.07, "shots": 9000, "seed": 7}
//
// Noise takes exactly one of "p" or "half_p" (p = 2 half_p). Results are
// JSON documents carrying the same schema_version; CSV is export only.

#ifndef DQA_EXPERIMENT_HPP_
#define DQA_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dqa/adder.hpp"
#include "dqa/noise.hpp"
#include "dqa/ntpa.hpp"

namespace dqa {

inline constexpr int kSchemaVersion = 1;

enum class Mode { exact, sample, analytic, compare, ntpa, lemmas };
enum class Format { json, csv };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);  // throws ValidationError
Format parse_format(std::string_view text);

struct ExperimentSpec {
  Mode mode = Mode::exact;
  std::vector<std::uint64_t> inputs;
  std::optional<std::size_t> n;  // nullopt: auto width
  NoiseModel noise;
  Engine engine = Engine::factorized;
  std::size_t shots = 9000;
  std::uint64_t seed = 0;
  std::optional<double> a;  // analytic and lemma modes
  std::size_t threshold = 1;
  std::uint64_t prime = 0;
  NoisyRounds rounds = NoisyRounds::both;
  bool trajectory = false;
  std::vector<std::size_t> subset;

  // Throws ValidationError on unknown keys, wrong types, both or neither
  // of p/half_p for a noisy kind, or an unsupported schema_version.
  static ExperimentSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  std::size_t resolved_n() const;
  DqaConfig dqa_config() const;
  NtpaConfig ntpa_config() const;
  // Throws ValidationError if a field required by `mode` is missing.
  void validate() const;
};

ExperimentSpec load_spec(const std::string& path);

struct ComparisonRow {
  std::uint64_t outcome = 0;
  std::string binary;
  std::uint64_t count = 0;
  double empirical = 0.0;
  double analytic = 0.0;
};

struct ComparisonReport {
  double total_variation = 0.0;
  double chi_square = 0.0;
  std::size_t degrees_of_freedom = 0;
  double p_value = 1.0;
  std::vector<ComparisonRow> rows;

  nlohmann::json to_json() const;
};

// Chi-square runs over outcomes with nonzero expected count; an observed
// count where the expectation is zero gives chi_square = inf, p_value = 0.
// Throws ValidationError when the widths differ.
ComparisonReport compare_distributions(const Histogram& empirical,
                                       const OutcomeDistribution& analytic);

// Rows: outcome,binary_string,angle_radians,probability.
void export_polar(const OutcomeDistribution& dist, std::ostream& os);
void export_polar(const OutcomeDistribution& dist, const std::string& path);

nlohmann::json distribution_to_json(const OutcomeDistribution& dist);
OutcomeDistribution distribution_from_json(const nlohmann::json& j);

struct ExperimentOutput {
  nlohmann::json document;
  std::string csv;
  bool passed = true;  // lemmas mode: every check held
};

ExperimentOutput run_experiment(const ExperimentSpec& spec);

// Writes the document as JSON or its CSV export; "-" means stdout.
void write_output(const ExperimentOutput& out, Format format, const std::string& path);

}  // namespace dqa

#endif  // DQA_EXPERIMENT_HPP_
