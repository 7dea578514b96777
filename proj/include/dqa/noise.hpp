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

// Link noise: single-qubit dephasing and depolarising channels applied
// independently to every qubit of a shared GHZ resource.

#ifndef DQA_NOISE_HPP_
#define DQA_NOISE_HPP_

#include <cstddef>
#include <span>
#include <string_view>

#include "dqa/qkernel.hpp"

namespace dqa {

enum class NoiseKind { none, dephasing, depolarising };

std::string_view to_string(NoiseKind kind);
// Accepts "none", "dephasing", "depolarising" (and "depolarizing").
NoiseKind parse_noise_kind(std::string_view text);

// `p` is the full channel parameter: dephasing flips the phase with
// probability p/2, so off-diagonals shrink by (1 - p).
struct NoiseModel {
  NoiseKind kind = NoiseKind::none;
  double p = 0.0;

  static NoiseModel none() { return {}; }
  static NoiseModel dephasing(double p);
  static NoiseModel depolarising(double p);

  // Throws std::invalid_argument unless 0 <= p <= 1.
  void validate() const;
  bool is_identity() const { return kind == NoiseKind::none || p == 0.0; }
};

// {sqrt(1 - p/2) I, sqrt(p/2) Z}.
KrausChannel dephasing_channel(double p);

// rho -> (1 - p) rho + p I/2 as {sqrt(1 - 3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z}.
KrausChannel depolarising_channel(double p);

// The single-qubit channel of a model; identity channel for kind none.
KrausChannel single_qubit_channel(const NoiseModel& model);

// Applies the model's one-qubit channel to each listed qubit independently.
DensityMatrix apply_link_noise(DensityMatrix rho, std::span<const std::size_t> ghz_qubits,
                               const NoiseModel& model);

// Trajectory form: one sampled Kraus branch per listed qubit.
StateVector apply_link_noise_sampled(StateVector psi,
                                     std::span<const std::size_t> ghz_qubits,
                                     const NoiseModel& model, Rng& rng);

}  // namespace dqa

#endif  // DQA_NOISE_HPP_
