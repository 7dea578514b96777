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

// DISTRIBUTED-QFT-ADDER: a server holds an n-qubit result register and m
// parties add their integers into it through GHZ-mediated fan-out CNOTs.
//
// Per result qubit (column) s the protocol is
//   H|0>  ->  fan-out to the m parties  ->  party i applies e^{i theta_i}
//   on its copy  ->  fan-out again to uncompute the copies,
// with theta_i = 2 pi t_i / 2^{n-s}. The n server qubits then go through the
// inverse QFT and are measured.
//
// Column s is carried by register qubit n-1-s (qubit 0 is the most
// significant bit of the outcome). Party inputs are classical integers:
// their controlled-phase block reduces to the diagonal phase on the copy.
//
// Engines:
//   factorized  one (1 + m)-qubit system per column, tensored before IQFT
//   full        one global density matrix for all columns (oracle)
//   sample      shots drawn from the factorized distribution, or simulated
//               one trajectory per shot

#ifndef DQA_ADDER_HPP_
#define DQA_ADDER_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dqa/noise.hpp"
#include "dqa/qkernel.hpp"

namespace dqa {

enum class Engine { factorized, full, sample };

// Which of the two fan-out rounds see noisy GHZ resources.
enum class NoisyRounds { both, entangle_only };

struct DqaConfig {
  std::vector<std::uint64_t> inputs;
  std::size_t n = 1;
  NoiseModel noise;
  Engine engine = Engine::factorized;
  std::size_t shots = 9000;
  std::uint64_t seed = 0;
  NoisyRounds noisy_rounds = NoisyRounds::both;
  bool trajectory = false;  // sample engine: per-shot trajectories

  std::size_t parties() const { return inputs.size(); }
  // Throws ValidationError.
  void validate() const;
};

struct OutcomeDistribution {
  std::size_t n = 0;
  ProbabilityDistribution probs;
};

struct Histogram {
  std::size_t n = 0;
  std::vector<std::uint64_t> counts;
  std::uint64_t shots = 0;

  std::vector<double> frequencies() const;
};

// Largest dense register the engines will build: DQA_MAX_QUBITS when set,
// otherwise 12.
std::size_t max_register_qubits();

// (sum t) mod 2^n.
std::uint64_t correct_sum(std::span<const std::uint64_t> inputs, std::size_t n);

// max(1, bit length of sum t).
std::size_t auto_bit_width(std::span<const std::uint64_t> inputs);

// 2 pi t / 2^{n-s} reduced to [0, 2 pi).
double party_phase_angle(std::uint64_t t, std::size_t s, std::size_t n);

// MSB-first binary string of `value` with `n` digits.
std::string binary_string(std::uint64_t value, std::size_t n);

OutcomeDistribution run_exact_factorized(const DqaConfig& config);
OutcomeDistribution run_exact_full(const DqaConfig& config);
// Dispatches on config.engine; `sample` resolves to the factorized engine.
OutcomeDistribution run_exact(const DqaConfig& config);

// One outcome per shot, in shot order. Shot k draws from an Rng seeded by
// (seed, k), so results do not depend on evaluation order.
std::vector<std::uint64_t> sample_outcomes(const DqaConfig& config);
Histogram sample(const DqaConfig& config);

// State of server column s right before the inverse QFT.
DensityMatrix server_qubit_reduced_state(const DqaConfig& config, std::size_t s);

// 2 |rho_01| of every column's server state.
std::vector<double> column_fidelity_params(const DqaConfig& config);

// Mean of column_fidelity_params after checking the columns agree within
// 1e-9. Throws std::logic_error otherwise.
double fit_fidelity_param(const DqaConfig& config);

struct ExponentFit {
  double exponent = 0.0;       // a = (1 - p)^exponent
  double max_residual = 0.0;   // max |a_sim - (1 - p)^exponent| over the grid
};

// Least-squares fit of log a against log(1 - p) over the grid. Each a is
// read off the full-register oracle at n = 1 with `parties` inputs of 1,
// where P(correct) = (1 + a) / 2. Grid points p = 0 and p = 1 enter only the
// residual.
ExponentFit fit_noise_exponent(NoiseKind kind, std::size_t parties,
                               std::span<const double> p_grid,
                               NoisyRounds rounds = NoisyRounds::both);

}  // namespace dqa

#endif  // DQA_ADDER_HPP_
