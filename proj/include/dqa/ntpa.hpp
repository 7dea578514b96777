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


// NO-TP-ADDER: summation without a trusted server.
//
// Party i hides X_i in a polynomial g_i of degree t - 1 over GF(q). In
// round r = 1..m party r acts as server and the parties run the adder on
// their shares g_i(r), yielding G(r) = sum_i g_i(r). Any t of the values
// G(r) mod q interpolate G(0) = sum_i X_i mod q.
//
// Round bit widths are chosen so the integer share sum never wraps mod 2^n
// before the classical mod-q reduction.

#ifndef DQA_NTPA_HPP_
#define DQA_NTPA_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dqa/adder.hpp"
#include "dqa/noise.hpp"
#include "dqa/sss.hpp"

namespace dqa {

struct NtpaConfig {
  std::vector<std::uint64_t> inputs;  // X_1..X_m
  std::size_t threshold = 1;
  std::uint64_t prime = 2;
  NoiseModel noise;
  // factorized or full: exact distributions. sample: `shots` trials.
  Engine engine = Engine::factorized;
  std::size_t shots = 9000;
  std::uint64_t seed = 0;
  NoisyRounds noisy_rounds = NoisyRounds::both;
  bool trajectory = false;
  // 1-based rounds used for reconstruction; empty means the first t.
  std::vector<std::size_t> subset;

  std::size_t parties() const { return inputs.size(); }
  // Throws ValidationError.
  void validate() const;
  // The rounds reconstruction will use, validated.
  std::vector<std::size_t> reconstruction_rounds() const;
};

// max(1, ceil(log2(m (q - 1) + 1))).
std::size_t required_bits(std::size_t m, std::uint64_t q);

struct RoundResult {
  std::size_t round = 0;   // r, 1-based
  std::size_t server = 0;  // acting server party, 1-based
  std::size_t bits = 0;    // n_r
  std::vector<std::uint64_t> inputs;  // the shares g_i(r) fed to the adder
  std::optional<OutcomeDistribution> distribution;  // exact engines
  std::vector<std::uint64_t> samples;               // sample engine, one per trial
};

// Runs one adder round on `shares`. Only config's noise, engine, shots,
// seed, noisy_rounds and trajectory fields are read.
RoundResult run_round(std::size_t round, std::span<const std::uint64_t> shares,
                      std::size_t n_round, const NtpaConfig& config);

struct NtpaResult {
  std::uint64_t expected = 0;  // sum X_i mod q
  std::vector<SecretPolynomial> polynomials;
  std::vector<RoundResult> rounds;
  std::vector<std::size_t> used_rounds;
  // Exact engines: distribution of the reconstructed value over GF(q).
  std::vector<double> reconstruction;
  // Sample engine: reconstructed value per trial and their frequencies.
  std::vector<std::uint64_t> trial_values;
  std::uint64_t most_likely = 0;
  double success_probability = 0.0;  // exact, or empirical when sampling
};

NtpaResult run_ntpa(const NtpaConfig& config);

// Lagrange weights at zero for the given 1-based points.
std::vector<std::uint64_t> lagrange_weights_at_zero(std::span<const std::size_t> points,
                                                    const PrimeField& field);

// Exact probability that reconstruction returns sum X_i mod q. Sampling
// configs are evaluated with the factorized engine.
double success_probability(const NtpaConfig& config);

}  // namespace dqa

#endif  // DQA_NTPA_HPP_
