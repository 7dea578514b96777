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


#include "dqa/experiment.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "dqa/analytic.hpp"
#include "dqa/errors.hpp"

namespace dqa {
namespace {

bool is_nonnegative_integer(const nlohmann::json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "schema_version", "mode",  "inputs", "n",         "kind",   "p",
      "half_p",         "shots", "seed",   "a",         "engine", "threshold",
      "prime",          "rounds", "trajectory", "subset"};
  return keys;
}

std::string_view engine_name(Engine e) {
  switch (e) {
    case Engine::factorized: return "factorized";
    case Engine::full: return "full";
    case Engine::sample: return "sample";
  }
  return "factorized";
}

Engine parse_engine(std::string_view s) {
  if (s == "factorized") return Engine::factorized;
  if (s == "full") return Engine::full;
  if (s == "sample") return Engine::sample;
  throw ValidationError("unknown engine '" + std::string(s) + "'");
}

std::string_view rounds_name(NoisyRounds r) {
  return r == NoisyRounds::both ? "both" : "entangle_only";
}

NoisyRounds parse_rounds(std::string_view s) {
  if (s == "both") return NoisyRounds::both;
  if (s == "entangle_only") return NoisyRounds::entangle_only;
  throw ValidationError("unknown rounds value '" + std::string(s) + "'");
}

double spec_a(const ExperimentSpec& spec) {
  if (spec.a) return *spec.a;
  const std::size_t rounds = spec.rounds == NoisyRounds::both ? 2 : 1;
  return predicted_a(spec.noise, spec.inputs.size() + 1, rounds);
}

json lemma_json(const LemmaReport& r, std::string_view source) {
  return {{"lemma", r.name},
          {"source", source},
          {"passed", r.passed},
          {"comparisons", r.comparisons},
          {"worst_gap", r.worst_gap},
          {"failures", r.failures}};
}

std::string distribution_csv(const OutcomeDistribution& dist) {
  std::ostringstream os;
  export_polar(dist, os);
  return os.str();
}

json histogram_json(const Histogram& h) {
  return {{"n", h.n}, {"shots", h.shots}, {"counts", h.counts},
          {"frequencies", h.frequencies()}};
}

ExperimentOutput run_exact_mode(const ExperimentSpec& spec) {
  const DqaConfig c = spec.dqa_config();
  const auto dist = run_exact(c);
  ExperimentOutput out;
  const std::uint64_t correct = correct_sum(c.inputs, c.n);
  out.document = {{"correct", correct},
                  {"correct_binary", binary_string(correct, c.n)},
                  {"distribution", distribution_to_json(dist)}};
  if (c.engine != Engine::full) out.document["fidelity_param"] = fit_fidelity_param(c);
  out.csv = distribution_csv(dist);
  return out;
}

ExperimentOutput run_sample_mode(const ExperimentSpec& spec) {
  DqaConfig c = spec.dqa_config();
  c.engine = Engine::sample;
  const Histogram h = sample(c);
  ExperimentOutput out;
  const std::uint64_t correct = correct_sum(c.inputs, c.n);
  out.document = {{"correct", correct},
                  {"correct_binary", binary_string(correct, c.n)},
                  {"histogram", histogram_json(h)}};
  std::ostringstream os;
  os << "outcome,binary_string,count,frequency\n";
  const auto freq = h.frequencies();
  for (std::size_t x = 0; x < h.counts.size(); ++x) {
    os << x << ',' << binary_string(x, h.n) << ',' << h.counts[x] << ',' << json(freq[x]).dump()
       << '\n';
  }
  out.csv = os.str();
  return out;
}

ExperimentOutput run_analytic_mode(const ExperimentSpec& spec) {
  AnalyticParams params{spec.inputs, spec.resolved_n(), spec_a(spec)};
  const auto dist = analytic_distribution(params);
  ExperimentOutput out;
  const std::uint64_t correct = correct_sum(params.inputs, params.n);
  out.document = {{"a", params.a},
                  {"a_source", spec.a ? "spec" : "predicted"},
                  {"correct", correct},
                  {"correct_binary", binary_string(correct, params.n)},
                  {"distribution", distribution_to_json(dist)}};
  out.csv = distribution_csv(dist);
  return out;
}

ExperimentOutput run_compare_mode(const ExperimentSpec& spec) {
  DqaConfig c = spec.dqa_config();
  c.engine = Engine::sample;
  const Histogram h = sample(c);
  const double a = spec.a ? *spec.a : fit_fidelity_param(c);
  const auto dist = analytic_distribution({c.inputs, c.n, a});
  const auto report = compare_distributions(h, dist);
  ExperimentOutput out;
  out.document = {{"a", a}, {"report", report.to_json()}};
  std::ostringstream os;
  os << "outcome,binary_string,count,empirical,analytic\n";
  for (const auto& r : report.rows) {
    os << r.outcome << ',' << r.binary << ',' << r.count << ',' << json(r.empirical).dump() << ','
       << json(r.analytic).dump() << '\n';
  }
  out.csv = os.str();
  return out;
}

ExperimentOutput run_ntpa_mode(const ExperimentSpec& spec) {
  const NtpaConfig c = spec.ntpa_config();
  const NtpaResult r = run_ntpa(c);
  ExperimentOutput out;
  json rounds = json::array();
  for (const auto& rr : r.rounds) {
    json jr = {{"round", rr.round}, {"server", rr.server}, {"bits", rr.bits},
               {"inputs", rr.inputs}};
    if (rr.distribution) jr["probabilities"] = rr.distribution->probs.probs();
    if (!rr.samples.empty()) jr["samples"] = rr.samples;
    rounds.push_back(std::move(jr));
  }
  const std::size_t n_round = required_bits(c.parties(), c.prime);
  const std::size_t noisy = c.noisy_rounds == NoisyRounds::both ? 2 : 1;
  const double a = predicted_a(c.noise, c.parties() + 1, noisy);
  out.document = {
      {"expected", r.expected},
      {"most_likely", r.most_likely},
      {"used_rounds", r.used_rounds},
      {"round_bits", n_round},
      {"success_probability", r.success_probability},
      {"success_lower_bound",
       std::pow((1.0 + a) / 2.0, static_cast<double>(n_round * c.threshold))},
      {"reconstruction", r.reconstruction},
      {"rounds", std::move(rounds)}};
  if (!r.trial_values.empty()) out.document["trial_values"] = r.trial_values;
  std::ostringstream os;
  os << "value,probability\n";
  for (std::size_t v = 0; v < r.reconstruction.size(); ++v) {
    os << v << ',' << json(r.reconstruction[v]).dump() << '\n';
  }
  out.csv = os.str();
  return out;
}

ExperimentOutput run_lemmas_mode(const ExperimentSpec& spec) {
  const std::size_t n = spec.resolved_n();
  const double a = spec_a(spec);
  std::vector<LemmaReport> analytic{check_reflection_symmetry(n, a),
                                    check_power_of_two_dominance(n, a),
                                    check_proximity_ordering(n, a)};
  json reports = json::array();
  ExperimentOutput out;
  for (const auto& r : analytic) {
    reports.push_back(lemma_json(r, "analytic"));
    out.passed = out.passed && r.passed;
  }
  if (!spec.inputs.empty()) {
    const DqaConfig c = spec.dqa_config();
    const auto profile = error_profile(run_exact(c), correct_sum(c.inputs, c.n));
    for (const auto& r : {check_reflection_symmetry(profile), check_power_of_two_dominance(profile),
                          check_proximity_ordering(profile)}) {
      reports.push_back(lemma_json(r, "simulated"));
      out.passed = out.passed && r.passed;
    }
  }
  out.document = {{"n", n}, {"a", a}, {"passed", out.passed}, {"reports", reports}};
  std::ostringstream os;
  os << "lemma,source,passed,comparisons,worst_gap\n";
  for (const auto& r : reports) {
    os << r["lemma"].get<std::string>() << ',' << r["source"].get<std::string>() << ','
       << (r["passed"].get<bool>() ? "true" : "false") << ',' << r["comparisons"] << ','
       << r["worst_gap"].dump() << '\n';
  }
  out.csv = os.str();
  return out;
}

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::exact: return "exact";
    case Mode::sample: return "sample";
    case Mode::analytic: return "analytic";
    case Mode::compare: return "compare";
    case Mode::ntpa: return "ntpa";
    case Mode::lemmas: return "lemmas";
  }
  return "exact";
}

Mode parse_mode(std::string_view s) {
  for (Mode m : {Mode::exact, Mode::sample, Mode::analytic, Mode::compare, Mode::ntpa,
                 Mode::lemmas}) {
    if (s == to_string(m)) return m;
  }
  throw ValidationError("unknown mode '" + std::string(s) + "'");
}

Format parse_format(std::string_view s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  throw ValidationError("unknown format '" + std::string(s) + "'");
}

ExperimentSpec ExperimentSpec::from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("spec must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known_keys().contains(key)) throw ValidationError("unknown spec key '" + key + "'");
  }
  ExperimentSpec s;
  try {
    if (j.contains("schema_version") && j["schema_version"].get<int>() != kSchemaVersion) {
      throw ValidationError("unsupported schema_version");
    }
    if (j.contains("mode")) s.mode = parse_mode(j["mode"].get<std::string>());
    if (j.contains("inputs")) {
      for (const auto& v : j["inputs"]) {
        if (!is_nonnegative_integer(v)) {
          throw ValidationError("inputs must be non-negative integers");
        }
        s.inputs.push_back(v.get<std::uint64_t>());
      }
    }
    if (j.contains("n")) {
      const auto& n = j["n"];
      if (n.is_string()) {
        if (n.get<std::string>() != "auto") throw ValidationError("n must be an integer or \"auto\"");
      } else if (is_nonnegative_integer(n)) {
        s.n = n.get<std::size_t>();
      } else {
        throw ValidationError("n must be an integer or \"auto\"");
      }
    }
    const NoiseKind kind = j.contains("kind") ? parse_noise_kind(j["kind"].get<std::string>())
                                              : NoiseKind::none;
    const bool has_p = j.contains("p");
    const bool has_half = j.contains("half_p");
    if (has_p && has_half) throw ValidationError("give exactly one of p and half_p");
    if (kind != NoiseKind::none && !has_p && !has_half) {
      throw ValidationError("noise kind needs p or half_p");
    }
    double p = 0.0;
    if (has_p) p = j["p"].get<double>();
    if (has_half) p = 2.0 * j["half_p"].get<double>();
    s.noise = NoiseModel{kind, p};
    if (j.contains("engine")) s.engine = parse_engine(j["engine"].get<std::string>());
    if (j.contains("shots")) s.shots = j["shots"].get<std::size_t>();
    if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("a")) s.a = j["a"].get<double>();
    if (j.contains("threshold")) s.threshold = j["threshold"].get<std::size_t>();
    if (j.contains("prime")) s.prime = j["prime"].get<std::uint64_t>();
    if (j.contains("rounds")) s.rounds = parse_rounds(j["rounds"].get<std::string>());
    if (j.contains("trajectory")) s.trajectory = j["trajectory"].get<bool>();
    if (j.contains("subset")) s.subset = j["subset"].get<std::vector<std::size_t>>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed spec: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  return s;
}

json ExperimentSpec::to_json() const {
  json j = {{"schema_version", kSchemaVersion},
            {"mode", to_string(mode)},
            {"inputs", inputs},
            {"kind", dqa::to_string(noise.kind)},
            {"p", noise.p},
            {"engine", engine_name(engine)},
            {"shots", shots},
            {"seed", seed},
            {"threshold", threshold},
            {"prime", prime},
            {"rounds", rounds_name(rounds)},
            {"trajectory", trajectory},
            {"subset", subset}};
  if (n) {
    j["n"] = *n;
  } else {
    j["n"] = "auto";
  }
  if (a) j["a"] = *a;
  return j;
}

std::size_t ExperimentSpec::resolved_n() const {
  if (n) return *n;
  if (inputs.empty()) throw ValidationError("n is required when there are no inputs");
  return auto_bit_width(inputs);
}

DqaConfig ExperimentSpec::dqa_config() const {
  DqaConfig c;
  c.inputs = inputs;
  c.n = resolved_n();
  c.noise = noise;
  c.engine = engine;
  c.shots = shots;
  c.seed = seed;
  c.noisy_rounds = rounds;
  c.trajectory = trajectory;
  c.validate();
  return c;
}

NtpaConfig ExperimentSpec::ntpa_config() const {
  NtpaConfig c;
  c.inputs = inputs;
  c.threshold = threshold;
  c.prime = prime;
  c.noise = noise;
  c.engine = engine;
  c.shots = shots;
  c.seed = seed;
  c.noisy_rounds = rounds;
  c.trajectory = trajectory;
  c.subset = subset;
  c.validate();
  return c;
}

void ExperimentSpec::validate() const {
  try {
    noise.validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  if (a && !(*a >= 0.0 && *a <= 1.0)) throw ValidationError("a must lie in [0, 1]");
  switch (mode) {
    case Mode::exact:
    case Mode::sample:
    case Mode::compare:
      dqa_config();
      break;
    case Mode::analytic:
      if (inputs.empty()) throw ValidationError("analytic mode needs inputs");
      resolved_n();
      break;
    case Mode::ntpa:
      if (prime == 0) throw ValidationError("ntpa mode needs a prime");
      ntpa_config();
      break;
    case Mode::lemmas:
      resolved_n();
      if (!a && inputs.empty()) throw ValidationError("lemmas mode needs a or inputs");
      if (!inputs.empty()) dqa_config();
      break;
  }
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return ExperimentSpec::from_json(j);
}

json ComparisonReport::to_json() const {
  json rows_json = json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"outcome", r.outcome},
                         {"binary", r.binary},
                         {"count", r.count},
                         {"empirical", r.empirical},
                         {"analytic", r.analytic}});
  }
  json j = {{"total_variation", total_variation},
            {"degrees_of_freedom", degrees_of_freedom},
            {"p_value", p_value},
            {"rows", rows_json}};
  // JSON has no infinity.
  j["chi_square"] = std::isfinite(chi_square) ? json(chi_square) : json(nullptr);
  return j;
}

ComparisonReport compare_distributions(const Histogram& empirical,
                                       const OutcomeDistribution& analytic) {
  if (empirical.n != analytic.n || empirical.counts.size() != analytic.probs.size()) {
    throw ValidationError("histogram and distribution widths differ");
  }
  if (empirical.shots == 0) throw ValidationError("histogram has no shots");
  ComparisonReport rep;
  const auto freq = empirical.frequencies();
  const double shots = static_cast<double>(empirical.shots);
  std::size_t bins = 0;
  bool impossible = false;
  for (std::size_t x = 0; x < freq.size(); ++x) {
    const double p = analytic.probs[x];
    rep.rows.push_back({x, binary_string(x, empirical.n), empirical.counts[x], freq[x], p});
    rep.total_variation += 0.5 * std::abs(freq[x] - p);
    const double expected = p * shots;
    if (expected > 0.0) {
      const double d = static_cast<double>(empirical.counts[x]) - expected;
      rep.chi_square += d * d / expected;
      ++bins;
    } else if (empirical.counts[x] > 0) {
      impossible = true;
    }
  }
  rep.degrees_of_freedom = bins > 0 ? bins - 1 : 0;
  if (impossible) {
    rep.chi_square = std::numeric_limits<double>::infinity();
    rep.p_value = 0.0;
  } else if (rep.degrees_of_freedom > 0) {
    boost::math::chi_squared dist(static_cast<double>(rep.degrees_of_freedom));
    rep.p_value = boost::math::cdf(boost::math::complement(dist, rep.chi_square));
  }
  return rep;
}

void export_polar(const OutcomeDistribution& dist, std::ostream& os) {
  os << "outcome,binary_string,angle_radians,probability\n";
  const auto points = polar_coordinates(dist);
  for (std::size_t x = 0; x < points.size(); ++x) {
    os << x << ',' << binary_string(x, dist.n) << ',' << json(points[x].angle).dump() << ','
       << json(points[x].radius).dump() << '\n';
  }
}

void export_polar(const OutcomeDistribution& dist, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  export_polar(dist, out);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

json distribution_to_json(const OutcomeDistribution& dist) {
  json outcomes = json::array();
  for (std::size_t x = 0; x < dist.probs.size(); ++x) {
    outcomes.push_back({{"outcome", x},
                        {"binary", binary_string(x, dist.n)},
                        {"probability", dist.probs[x]}});
  }
  return {{"schema_version", kSchemaVersion},
          {"n", dist.n},
          {"probabilities", dist.probs.probs()},
          {"outcomes", outcomes}};
}

OutcomeDistribution distribution_from_json(const json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    auto probs = j.at("probabilities").get<std::vector<double>>();
    if (n == 0 || n >= 64 || probs.size() != (std::size_t{1} << n)) {
      throw ValidationError("distribution length does not match n");
    }
    return {n, ProbabilityDistribution(std::move(probs))};
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed distribution: ") + e.what());
  }
}

ExperimentOutput run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentOutput out;
  switch (spec.mode) {
    case Mode::exact: out = run_exact_mode(spec); break;
    case Mode::sample: out = run_sample_mode(spec); break;
    case Mode::analytic: out = run_analytic_mode(spec); break;
    case Mode::compare: out = run_compare_mode(spec); break;
    case Mode::ntpa: out = run_ntpa_mode(spec); break;
    case Mode::lemmas: out = run_lemmas_mode(spec); break;
  }
  out.document["schema_version"] = kSchemaVersion;
  out.document["mode"] = to_string(spec.mode);
  out.document["spec"] = spec.to_json();
  return out;
}

void write_output(const ExperimentOutput& out, Format format, const std::string& path) {
  const std::string text = format == Format::json ? out.document.dump(2) + "\n" : out.csv;
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace dqa
