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


#include "dqa/ntpa.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <string>

#include "dqa/errors.hpp"

namespace dqa {
namespace {

// Independent streams for the polynomial draw and each round.
std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x6e747061u};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

constexpr std::uint64_t kPolynomialStream = 0;

}  // namespace

void NtpaConfig::validate() const {
  const std::size_t m = parties();
  if (m == 0) throw ValidationError("at least one party is required");
  if (threshold < 1 || threshold > m) {
    throw ValidationError("threshold must lie in [1, " + std::to_string(m) + "]");
  }
  const PrimeField field(prime);
  if (prime <= m) throw ValidationError("prime must exceed the number of parties");
  for (std::uint64_t x : inputs) {
    if (!field.contains(x)) throw ValidationError("every input must be smaller than the prime");
  }
  if (engine == Engine::sample && shots == 0) throw ValidationError("sampling needs trials");
  noise.validate();
  reconstruction_rounds();
}

std::vector<std::size_t> NtpaConfig::reconstruction_rounds() const {
  if (subset.empty()) {
    std::vector<std::size_t> first(threshold);
    for (std::size_t i = 0; i < threshold; ++i) first[i] = i + 1;
    return first;
  }
  if (subset.size() != threshold) {
    throw ValidationError("reconstruction subset must contain exactly t rounds");
  }
  std::set<std::size_t> seen;
  for (std::size_t r : subset) {
    if (r < 1 || r > parties()) throw ValidationError("subset round out of range");
    if (!seen.insert(r).second) throw ValidationError("subset rounds must be distinct");
  }
  return subset;
}

std::size_t required_bits(std::size_t m, std::uint64_t q) {
  if (m < 1 || q < 2) throw ValidationError("required_bits needs m >= 1 and q >= 2");
  const unsigned __int128 top = static_cast<unsigned __int128>(m) * (q - 1);
  std::size_t bits = 0;
  for (unsigned __int128 v = top; v != 0; v >>= 1) ++bits;
  return std::max<std::size_t>(1, bits);
}

RoundResult run_round(std::size_t round, std::span<const std::uint64_t> shares,
                      std::size_t n_round, const NtpaConfig& config) {
  RoundResult res;
  res.round = round;
  res.server = round;
  res.bits = n_round;
  res.inputs.assign(shares.begin(), shares.end());

  DqaConfig dqa;
  dqa.inputs = res.inputs;
  dqa.n = n_round;
  dqa.noise = config.noise;
  dqa.engine = config.engine;
  dqa.shots = config.shots;
  dqa.seed = derived_seed(config.seed, round);
  dqa.noisy_rounds = config.noisy_rounds;
  dqa.trajectory = config.trajectory;
  if (config.engine == Engine::sample) {
    res.samples = sample_outcomes(dqa);
  } else {
    res.distribution = run_exact(dqa);
  }
  return res;
}

std::vector<std::uint64_t> lagrange_weights_at_zero(std::span<const std::size_t> points,
                                                    const PrimeField& field) {
  std::vector<std::uint64_t> w(points.size());
  for (std::size_t r = 0; r < points.size(); ++r) {
    std::uint64_t num = 1;
    std::uint64_t den = 1;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j == r) continue;
      num = field.mul(num, points[j]);
      den = field.mul(den, field.sub(points[j], points[r]));
    }
    w[r] = field.mul(num, field.inverse(den));
  }
  return w;
}

NtpaResult run_ntpa(const NtpaConfig& config) {
  config.validate();
  const std::size_t m = config.parties();
  const PrimeField field(config.prime);
  const std::size_t n_round = required_bits(m, config.prime);

  NtpaResult out;
  for (std::uint64_t x : config.inputs) out.expected = field.add(out.expected, x);

  Rng poly_rng(derived_seed(config.seed, kPolynomialStream));
  std::vector<std::uint64_t> points(m);
  for (std::size_t r = 0; r < m; ++r) points[r] = r + 1;
  std::vector<std::vector<Share>> shares;  // shares[i][r - 1]
  for (std::uint64_t x : config.inputs) {
    out.polynomials.push_back(gen_polynomial(x, config.threshold, field, poly_rng));
    shares.push_back(eval_shares(out.polynomials.back(), points));
  }

  for (std::size_t r = 1; r <= m; ++r) {
    std::vector<std::uint64_t> round_inputs(m);
    for (std::size_t i = 0; i < m; ++i) round_inputs[i] = shares[i][r - 1].value;
    out.rounds.push_back(run_round(r, round_inputs, n_round, config));
  }

  out.used_rounds = config.reconstruction_rounds();
  const auto weights = lagrange_weights_at_zero(out.used_rounds, field);
  const std::uint64_t q = config.prime;

  if (config.engine == Engine::sample) {
    out.trial_values.assign(config.shots, 0);
    for (std::size_t k = 0; k < out.used_rounds.size(); ++k) {
      const auto& samples = out.rounds[out.used_rounds[k] - 1].samples;
      for (std::size_t trial = 0; trial < config.shots; ++trial) {
        const std::uint64_t g = field.reduce(samples[trial]);
        out.trial_values[trial] = field.add(out.trial_values[trial], field.mul(weights[k], g));
      }
    }
    std::vector<std::uint64_t> counts(q, 0);
    for (std::uint64_t v : out.trial_values) ++counts[v];
    out.reconstruction.resize(q);
    for (std::uint64_t v = 0; v < q; ++v) {
      out.reconstruction[v] = static_cast<double>(counts[v]) / static_cast<double>(config.shots);
    }
  } else {
    // The reconstruction map is linear, so its law is the mod-q
    // convolution of each used round's scaled pushforward.
    std::vector<double> acc(q, 0.0);
    acc[0] = 1.0;
    for (std::size_t k = 0; k < out.used_rounds.size(); ++k) {
      const auto& dist = *out.rounds[out.used_rounds[k] - 1].distribution;
      std::vector<double> term(q, 0.0);
      for (std::size_t g = 0; g < dist.probs.size(); ++g) {
        term[field.mul(weights[k], field.reduce(g))] += dist.probs[g];
      }
      std::vector<double> next(q, 0.0);
      for (std::uint64_t a = 0; a < q; ++a) {
        if (acc[a] == 0.0) continue;
        for (std::uint64_t b = 0; b < q; ++b) {
          if (term[b] == 0.0) continue;
          next[field.add(a, b)] += acc[a] * term[b];
        }
      }
      acc = std::move(next);
    }
    out.reconstruction = std::move(acc);
  }
  out.most_likely = static_cast<std::uint64_t>(
      std::max_element(out.reconstruction.begin(), out.reconstruction.end()) -
      out.reconstruction.begin());
  out.success_probability = out.reconstruction[out.expected];
  return out;
}

double success_probability(const NtpaConfig& config) {
  NtpaConfig exact = config;
  if (exact.engine == Engine::sample) exact.engine = Engine::factorized;
  return run_ntpa(exact).success_probability;
}

}  // namespace dqa
