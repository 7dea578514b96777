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


#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

#include "dqa/adder.hpp"
#include "dqa/errors.hpp"
#include "dqa/ghzlink.hpp"
#include "oracle.hpp"

namespace dqa {
namespace {

using Idx = std::vector<std::size_t>;

DqaConfig make(std::vector<std::uint64_t> inputs, std::size_t n, NoiseModel noise = {},
               Engine engine = Engine::factorized) {
  DqaConfig c;
  c.inputs = std::move(inputs);
  c.n = n;
  c.noise = noise;
  c.engine = engine;
  return c;
}

double tv(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d / 2;
}

TEST(CorrectSum, Examples) {
  EXPECT_EQ(correct_sum(std::vector<std::uint64_t>{1, 1, 1, 1}, 3), 4u);
  EXPECT_EQ(binary_string(4, 3), "100");
  EXPECT_EQ(correct_sum(std::vector<std::uint64_t>{10, 7}, 5), 17u);
  EXPECT_EQ(binary_string(17, 5), "10001");
  EXPECT_EQ(correct_sum(std::vector<std::uint64_t>{3}, 2), 3u);
  EXPECT_EQ(correct_sum(std::vector<std::uint64_t>{3, 3}, 2), 2u);
}

TEST(AutoBitWidth, Examples) {
  EXPECT_EQ(auto_bit_width(std::vector<std::uint64_t>{10, 7}), 5u);
  EXPECT_EQ(auto_bit_width(std::vector<std::uint64_t>{1, 1, 1, 1}), 3u);
  EXPECT_EQ(auto_bit_width(std::vector<std::uint64_t>{0}), 1u);
}

TEST(PartyPhaseAngle, Examples) {
  EXPECT_NEAR(party_phase_angle(4, 0, 3), std::numbers::pi, 1e-15);
  EXPECT_EQ(party_phase_angle(0, 1, 3), 0.0);
  EXPECT_NEAR(party_phase_angle(1, 2, 3), std::numbers::pi, 1e-15);
  EXPECT_NEAR(party_phase_angle(5, 1, 3), std::numbers::pi / 2, 1e-15);  // 10 pi / 4 mod 2 pi
}

TEST(Config, Validation) {
  EXPECT_THROW(run_exact(make({}, 2)), ValidationError);
  EXPECT_THROW(run_exact(make({1}, 0)), ValidationError);
  auto c = make({1}, 1);
  c.shots = 0;
  EXPECT_THROW(sample(c), ValidationError);
  EXPECT_THROW(run_exact(make({1}, 1, NoiseModel{NoiseKind::dephasing, 1.5})),
               std::invalid_argument);
}

TEST(Exact, NoiselessPointMassExamples) {
  for (Engine e : {Engine::factorized, Engine::full}) {
    EXPECT_NEAR(run_exact(make({2}, 2, {}, e)).probs[2], 1.0, 1e-12);
    EXPECT_NEAR(run_exact(make({1, 1}, 2, {}, e)).probs[2], 1.0, 1e-12);
    EXPECT_NEAR(run_exact(make({3, 3}, 2, {}, e)).probs[2], 1.0, 1e-12);
  }
  EXPECT_NEAR(run_exact(make({1, 1, 1, 1}, 3)).probs[4], 1.0, 1e-12);
  EXPECT_NEAR(run_exact(make({10, 7}, 5)).probs[17], 1.0, 1e-12);
}

TEST(Exact, NoiselessRandomConfigs) {
  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<std::size_t> pm(1, 5), pn(1, 6);
  std::uniform_int_distribution<std::uint64_t> pt(0, 200);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::uint64_t> inputs(pm(rng));
    for (auto& t : inputs) t = pt(rng);
    const std::size_t n = pn(rng);
    const auto d = run_exact_factorized(make(inputs, n));
    EXPECT_GE(d.probs[correct_sum(inputs, n)], 1 - 1e-10) << "trial " << trial;
  }
}

TEST(Exact, FactorizedMatchesFullOracle) {
  for (std::size_t m = 1; m <= 2; ++m) {
    for (std::size_t n = 1; n <= 2; ++n) {
      for (double p : {0.0, 0.1, 0.3, 1.0}) {
        for (NoiseKind kind : {NoiseKind::dephasing, NoiseKind::depolarising}) {
          std::vector<std::uint64_t> inputs(m);
          for (std::size_t i = 0; i < m; ++i) inputs[i] = 2 * i + 1;
          const auto a = run_exact_factorized(make(inputs, n, {kind, p}));
          const auto b = run_exact_full(make(inputs, n, {kind, p}, Engine::full));
          for (std::size_t x = 0; x < a.probs.size(); ++x) {
            EXPECT_NEAR(a.probs[x], b.probs[x], 1e-9) << m << n << p;
          }
        }
      }
    }
  }
}

TEST(Exact, FullEngineSequentialScheduleMatchesFactorized) {
  // 3 * 3 = 9 register qubits leave no room for a transient GHZ_4 next to
  // all copies, so the oracle runs columns one after another.
  const auto c = make({1, 2, 3}, 3, NoiseModel::depolarising(0.2));
  const auto a = run_exact_factorized(c);
  auto full = c;
  full.engine = Engine::full;
  const auto b = run_exact_full(full);
  for (std::size_t x = 0; x < 8; ++x) EXPECT_NEAR(a.probs[x], b.probs[x], 1e-9);
}

// Reference circuit with the party's data register held as qubits: server
// (2 qubits), data register (2 qubits), one copy qubit per column.
ProbabilityDistribution explicit_data_register(std::uint64_t t, const NoiseModel& noise) {
  const std::size_t n = 2;
  // Layout: 0,1 server; 2,3 data (MSB first); 4,5 copies for column 0,1.
  DensityMatrix rho = tensor(DensityMatrix::basis(4, t), DensityMatrix::basis(2, 0));
  rho = apply_unitary(std::move(rho), qft_unitary(n), Idx{0, 1});
  const auto ghz = generate_noisy_ghz(2, noise);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t server = n - 1 - s;
    const std::size_t copy = 4 + s;
    rho = entangle_fanout(std::move(rho), server, ghz, Idx{copy}).state;
    // Data bit j (qubit 3 - j) contributes 2 pi 2^j / 2^{n-s}.
    for (std::size_t j = 0; j < n; ++j) {
      const double angle = 2 * std::numbers::pi * static_cast<double>(1u << j) /
                           static_cast<double>(1u << (n - s));
      rho = apply_unitary(std::move(rho), controlled_phase(angle), Idx{3 - j, copy});
    }
    rho = disentangle_fanout(std::move(rho), server, Idx{copy}, ghz).state;
  }
  rho = apply_unitary(std::move(rho), qft_unitary(n, true), Idx{0, 1});
  return measurement_distribution(partial_trace(rho, Idx{0, 1}));
}

TEST(Exact, ClassicalPartyRegisterMatchesExplicitDataQubits) {
  for (const auto& noise : {NoiseModel::none(), NoiseModel::dephasing(0.2),
                            NoiseModel::depolarising(0.3)}) {
    for (std::uint64_t t = 0; t < 4; ++t) {
      const auto want = explicit_data_register(t, noise);
      const auto got = run_exact_factorized(make({t}, 2, noise));
      for (std::size_t x = 0; x < 4; ++x) {
        EXPECT_NEAR(got.probs[x], want[x], 1e-12) << "t=" << t << " p=" << noise.p;
      }
    }
  }
}

TEST(ServerState, NoiselessIsPhaseState) {
  const auto c = make({3, 6}, 3);
  for (std::size_t s = 0; s < 3; ++s) {
    const auto rho = server_qubit_reduced_state(c, s);
    const double th = party_phase_angle(9, s, 3);
    const Complex amps[] = {1 / std::numbers::sqrt2, std::polar(1 / std::numbers::sqrt2, th)};
    EXPECT_LT(max_abs_diff(rho.matrix(), DensityMatrix::pure(amps).matrix()), 1e-12);
  }
}

TEST(ServerState, DiagonalHalfAndFullDephasingMixed) {
  for (double p : {0.0, 0.3, 1.0}) {
    for (NoiseKind kind : {NoiseKind::dephasing, NoiseKind::depolarising}) {
      const auto rho = server_qubit_reduced_state(make({5, 2, 1}, 3, {kind, p}), 1);
      EXPECT_NEAR(rho(0, 0).real(), 0.5, 1e-12);
      EXPECT_NEAR(rho(1, 1).real(), 0.5, 1e-12);
      EXPECT_TRUE(rho.is_positive_semidefinite());
    }
  }
  const auto mixed = server_qubit_reduced_state(make({1}, 2, NoiseModel::dephasing(1.0)), 0);
  EXPECT_LT(max_abs_diff(mixed.matrix(), DensityMatrix::maximally_mixed(1).matrix()), 1e-12);
  EXPECT_THROW(server_qubit_reduced_state(make({1}, 2), 2), std::invalid_argument);
}

TEST(Fidelity, LimitsAndPowerLaw) {
  EXPECT_NEAR(fit_fidelity_param(make({1, 2}, 3)), 1.0, 1e-12);
  EXPECT_NEAR(fit_fidelity_param(make({1, 2}, 3, NoiseModel::dephasing(1.0))), 0.0, 1e-12);
  for (std::size_t m = 1; m <= 3; ++m) {
    std::vector<std::uint64_t> inputs(m, 3);
    for (double p : {0.05, 0.1, 0.14, 0.25, 0.5}) {
      for (NoiseKind kind : {NoiseKind::dephasing, NoiseKind::depolarising}) {
        const auto c = make(inputs, 3, {kind, p});
        const auto cols = column_fidelity_params(c);
        for (double a : cols) EXPECT_NEAR(a, cols.front(), 1e-9);
        EXPECT_NEAR(fit_fidelity_param(c), std::pow(1 - p, 2.0 * (m + 1)), 1e-9);
      }
    }
  }
}

TEST(Fidelity, SingleNoisyRoundHalvesExponent) {
  auto c = make({1, 1}, 2, NoiseModel::dephasing(0.2));
  c.noisy_rounds = NoisyRounds::entangle_only;
  EXPECT_NEAR(fit_fidelity_param(c), std::pow(0.8, 3), 1e-12);
}

TEST(Fidelity, OracleFitsExponentPerGhzQubit) {
  const double grid[] = {0.0, 0.05, 0.1, 0.14, 0.25, 0.5, 1.0};
  for (NoiseKind kind : {NoiseKind::dephasing, NoiseKind::depolarising}) {
    for (std::size_t m = 1; m <= 3; ++m) {
      const auto fit = fit_noise_exponent(kind, m, grid);
      EXPECT_NEAR(fit.exponent, 2.0 * (m + 1), 1e-9);
      EXPECT_LT(fit.max_residual, 1e-9);
      const auto one = fit_noise_exponent(kind, m, grid, NoisyRounds::entangle_only);
      EXPECT_NEAR(one.exponent, m + 1.0, 1e-9);
    }
  }
}

TEST(Capacity, GuardsAndEnvironmentOverride) {
  EXPECT_THROW(run_exact_factorized(make({1, 1, 1, 1, 1, 1}, 1)), CapacityError);
  EXPECT_THROW(run_exact_full(make({1, 1, 1}, 4, {}, Engine::full)), CapacityError);
  ::setenv("DQA_MAX_QUBITS", "4", 1);
  EXPECT_EQ(max_register_qubits(), 4u);
  EXPECT_THROW(run_exact_factorized(make({1, 1, 1}, 1)), CapacityError);
  ::unsetenv("DQA_MAX_QUBITS");
  EXPECT_EQ(max_register_qubits(), 12u);
  EXPECT_NO_THROW(run_exact_factorized(make({1, 1, 1}, 1)));
}

TEST(Sample, NoiselessConcentratesOnCorrectSum) {
  auto c = make({5, 9, 1}, 4, {}, Engine::sample);
  const auto h = sample(c);
  EXPECT_EQ(h.counts[15], 9000u);
  c.trajectory = true;
  c.shots = 200;
  EXPECT_EQ(sample(c).counts[15], 200u);
}

TEST(Sample, FixedSeedIsReproducible) {
  auto c = make({1, 1, 1, 1}, 3, NoiseModel::dephasing(0.14), Engine::sample);
  c.seed = 99;
  EXPECT_EQ(sample(c).counts, sample(c).counts);
  c.trajectory = true;
  c.shots = 300;
  EXPECT_EQ(sample(c).counts, sample(c).counts);
  auto other = c;
  other.seed = 100;
  EXPECT_NE(sample(c).counts, sample(other).counts);
}

TEST(Sample, CountsSumToShotsAndTvSmall) {
  auto c = make({1, 1, 1, 1}, 3, NoiseModel::dephasing(0.14), Engine::sample);
  c.seed = 5;
  const auto h = sample(c);
  std::uint64_t total = 0;
  for (auto v : h.counts) total += v;
  EXPECT_EQ(total, h.shots);
  const auto exact = run_exact_factorized(c);
  EXPECT_LE(tv(h.frequencies(), exact.probs.probs()), 0.03);
}

TEST(Sample, TrajectoryPathAgreesWithDistributionPath) {
  // Fixed regression config; Pearson chi-square against the exact
  // distribution. The 0.001 critical value for 3 degrees of freedom is
  // 16.266.
  auto c = make({1, 2}, 2, NoiseModel::depolarising(0.15), Engine::sample);
  c.seed = 31;
  c.shots = 4000;
  c.trajectory = true;
  const auto h = sample(c);
  const auto exact = run_exact_factorized(c);
  double chi2 = 0.0;
  for (std::size_t x = 0; x < 4; ++x) {
    const double e = exact.probs[x] * static_cast<double>(c.shots);
    chi2 += (static_cast<double>(h.counts[x]) - e) * (static_cast<double>(h.counts[x]) - e) / e;
  }
  EXPECT_LT(chi2, 16.266);
}

}  // namespace
}  // namespace dqa
