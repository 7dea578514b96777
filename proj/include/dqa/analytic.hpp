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


// Closed-form output law of the adder and the symmetry properties of its
// error pattern.
//
// With a uniform fidelity parameter a, the server state before the inverse
// QFT is a product of columns (|0><0| + |1><1| + a e^{-i theta_s}|0><1|
// + a e^{i theta_s}|1><0|) / 2, which gives
//
//   P(x) = 2^{-n} prod_s [1 + a cos(theta_s - 2 pi x / 2^{n-s})].
//
// Error probabilities are indexed by z = (y - correct) mod 2^n.

#ifndef DQA_ANALYTIC_HPP_
#define DQA_ANALYTIC_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dqa/adder.hpp"
#include "dqa/noise.hpp"

namespace dqa {

struct AnalyticParams {
  std::vector<std::uint64_t> inputs;
  std::size_t n = 1;
  double a = 1.0;

  // Throws ValidationError.
  void validate() const;
};

OutcomeDistribution analytic_distribution(const AnalyticParams& params);

// probs[z] = 2^{-n} prod_{s=1}^{n} [1 + a cos(2 pi z / 2^s)].
std::vector<double> error_distribution(std::size_t n, double a);

// Re-indexes an outcome distribution by offset from `correct`.
std::vector<double> error_profile(const OutcomeDistribution& dist, std::uint64_t correct);

// Per-qubit link noise on a GHZ resource of `ghz_size` qubits used in
// `rounds` fan-outs. Both noise kinds shrink the server coherence by
// (1 - p) per noisy qubit, so a = (1 - p)^{rounds * ghz_size}.
double predicted_a(const NoiseModel& noise, std::size_t ghz_size, std::size_t rounds = 2);

inline constexpr double kAnalyticLemmaTolerance = 1e-12;
inline constexpr double kSimulatedLemmaTolerance = 1e-9;

struct LemmaReport {
  std::string name;
  bool passed = true;
  std::size_t comparisons = 0;
  double worst_gap = 0.0;            // largest violation seen; 0 if none
  std::vector<std::string> failures;  // first few violations, human readable
};

// P(z) = P(2^n - z) for 1 <= z <= 2^{n-1}.
LemmaReport check_reflection_symmetry(std::size_t n, double a);
LemmaReport check_reflection_symmetry(std::span<const double> error_probs,
                                      double tol = kSimulatedLemmaTolerance);

// P(2^k) >= P(z) for 1 <= k < n, 1 <= z <= 2^k.
LemmaReport check_power_of_two_dominance(std::size_t n, double a);
LemmaReport check_power_of_two_dominance(std::span<const double> error_probs,
                                         double tol = kSimulatedLemmaTolerance);

// P(z) >= P(2^{k+1} - z) for 1 <= k < n, 1 <= z <= 2^k.
LemmaReport check_proximity_ordering(std::size_t n, double a);
LemmaReport check_proximity_ordering(std::span<const double> error_probs,
                                     double tol = kSimulatedLemmaTolerance);

struct PolarPoint {
  double angle = 0.0;   // 2 pi x / 2^n
  double radius = 0.0;  // P(x)
};

std::vector<PolarPoint> polar_coordinates(const OutcomeDistribution& dist);

}  // namespace dqa

#endif  // DQA_ANALYTIC_HPP_
