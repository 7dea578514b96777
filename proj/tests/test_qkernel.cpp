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
#include <numbers>
#include <random>

#include "dqa/qkernel.hpp"
#include "oracle.hpp"

namespace dqa {
namespace {

constexpr double kTight = 1e-12;
const double kHalf = 0.5;

std::vector<std::size_t> idx(std::initializer_list<std::size_t> l) { return l; }

TEST(Tensor, BasisProduct) {
  const auto r = tensor(DensityMatrix::basis(1, 0), DensityMatrix::basis(1, 1));
  EXPECT_EQ(r.num_qubits(), 2u);
  EXPECT_LT(max_abs_diff(r.matrix(), DensityMatrix::basis(2, 0b01).matrix()), kTight);
}

TEST(Tensor, TraceAndMixedProduct) {
  std::mt19937_64 rng(1);
  const auto rho = oracle::random_state(2, rng);
  const auto r = tensor(rho, DensityMatrix::maximally_mixed(1));
  EXPECT_NEAR(r.matrix().trace().real(), 1.0, 1e-12);
  const auto mm = tensor(DensityMatrix::maximally_mixed(1), DensityMatrix::maximally_mixed(1));
  EXPECT_LT(max_abs_diff(mm.matrix(), Complex(0.25) * Matrix::identity(4)), kTight);
}

TEST(ApplyUnitary, HadamardPhaseFlipCnot) {
  const auto plus = apply_unitary(DensityMatrix::basis(1, 0), gates::hadamard(), idx({0}));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(std::abs(plus(i, j) - kHalf), 0.0, kTight);

  const auto minus = apply_unitary(plus, gates::pauli_z(), idx({0}));
  EXPECT_NEAR(minus(0, 1).real(), -0.5, kTight);
  EXPECT_NEAR(minus(1, 1).real(), 0.5, kTight);

  const auto r = apply_unitary(DensityMatrix::basis(2, 0b10), gates::cnot(), idx({0, 1}));
  EXPECT_LT(max_abs_diff(r.matrix(), DensityMatrix::basis(2, 0b11).matrix()), kTight);
  const auto rev = apply_unitary(DensityMatrix::basis(2, 0b01), gates::cnot(), idx({1, 0}));
  EXPECT_LT(max_abs_diff(rev.matrix(), DensityMatrix::basis(2, 0b11).matrix()), kTight);
}

TEST(ApplyUnitary, MatchesEmbeddedOperatorOnRandomTargets) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const auto rho = oracle::random_state(n, rng);
    std::vector<std::size_t> all(n);
    for (std::size_t q = 0; q < n; ++q) all[q] = q;
    std::shuffle(all.begin(), all.end(), rng);
    const std::size_t k = 1 + trial % 2;
    std::vector<std::size_t> targets(all.begin(), all.begin() + k);
    const Matrix u = oracle::random_unitary(std::size_t{1} << k, rng);
    const auto got = apply_unitary(rho, Unitary(u), targets);
    const Matrix want = oracle::conjugate(oracle::embed(u, targets, n), rho.matrix());
    EXPECT_LT(max_abs_diff(got.matrix(), want), 1e-12) << "trial " << trial;
  }
}

TEST(ApplyUnitary, RejectsBadTargets) {
  const auto rho = DensityMatrix::basis(2, 0);
  EXPECT_THROW(apply_unitary(rho, gates::cnot(), idx({0})), std::invalid_argument);
  EXPECT_THROW(apply_unitary(rho, gates::cnot(), idx({1, 1})), std::invalid_argument);
  EXPECT_THROW(apply_unitary(rho, gates::hadamard(), idx({2})), std::invalid_argument);
}

TEST(Unitary, RejectsNonUnitary) {
  EXPECT_THROW(Unitary(Matrix{{1.0, 1.0}, {0.0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(Unitary(Matrix(3)), std::invalid_argument);
}

TEST(Kraus, RejectsIncompleteChannel) {
  EXPECT_THROW(KrausChannel({Complex(0.9) * Matrix::identity(2)}), std::invalid_argument);
  EXPECT_THROW(KrausChannel({}), std::invalid_argument);
}

TEST(Kraus, IdentityChannelLeavesStateUnchanged) {
  std::mt19937_64 rng(3);
  const auto rho = oracle::random_state(2, rng);
  const auto out = apply_kraus(rho, KrausChannel({Matrix::identity(2)}), idx({1}));
  EXPECT_LT(max_abs_diff(out.matrix(), rho.matrix()), kTight);
}

TEST(Kraus, SingleOperatorChannelEqualsUnitary) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 1 + trial % 2;
    const auto rho = oracle::random_state(3, rng);
    const Matrix u = oracle::random_unitary(std::size_t{1} << k, rng);
    const auto targets = k == 1 ? idx({2}) : idx({2, 0});
    const auto a = apply_kraus(rho, KrausChannel({u}), targets);
    const auto b = apply_unitary(rho, Unitary(u), targets);
    EXPECT_LT(max_abs_diff(a.matrix(), b.matrix()), 1e-12);
  }
}

TEST(Kraus, MatchesSumOfEmbeddedConjugations) {
  std::mt19937_64 rng(5);
  const double p = 0.3;
  const std::vector<Matrix> ops = {Complex(std::sqrt(1 - p)) * Matrix::identity(2),
                                   Complex(std::sqrt(p)) * gates::pauli_y().matrix()};
  const auto rho = oracle::random_state(3, rng);
  const auto got = apply_kraus(rho, KrausChannel(ops), idx({1}));
  Matrix want(8);
  for (const auto& k : ops) want = want + oracle::conjugate(oracle::embed(k, {1}, 3), rho.matrix());
  EXPECT_LT(max_abs_diff(got.matrix(), want), 1e-12);
}

TEST(PartialTrace, BellHalfIsMaximallyMixed) {
  const double h = 1.0 / std::numbers::sqrt2;
  const Complex bell[] = {h, 0.0, 0.0, h};
  const auto r = partial_trace(DensityMatrix::pure(bell), idx({0}));
  EXPECT_LT(max_abs_diff(r.matrix(), DensityMatrix::maximally_mixed(1).matrix()), kTight);
}

TEST(PartialTrace, KeepAllIsIdentity) {
  std::mt19937_64 rng(2);
  const auto rho = oracle::random_state(3, rng);
  EXPECT_LT(max_abs_diff(partial_trace(rho, idx({0, 1, 2})).matrix(), rho.matrix()), kTight);
}

TEST(PartialTrace, MatchesOracleAndKeepsAscendingOrder) {
  std::mt19937_64 rng(9);
  const auto rho = oracle::random_state(4, rng, 5);
  for (const auto& keep : {idx({0}), idx({3}), idx({1, 3}), idx({0, 2, 3})}) {
    const auto got = partial_trace(rho, keep);
    EXPECT_LT(max_abs_diff(got.matrix(), oracle::partial_trace(rho.matrix(), keep, 4)), 1e-12);
  }
  // Listing kept qubits out of order does not reorder them.
  const auto a = partial_trace(rho, idx({3, 1}));
  const auto b = partial_trace(rho, idx({1, 3}));
  EXPECT_LT(max_abs_diff(a.matrix(), b.matrix()), kTight);
}

TEST(PartialTrace, RejectsBadKeep) {
  const auto rho = DensityMatrix::basis(2, 0);
  EXPECT_THROW(partial_trace(rho, std::vector<std::size_t>{}), std::invalid_argument);
  EXPECT_THROW(partial_trace(rho, idx({0, 0})), std::invalid_argument);
  EXPECT_THROW(partial_trace(rho, idx({2})), std::invalid_argument);
}

TEST(Qft, OneQubitIsHadamard) {
  EXPECT_LT(max_abs_diff(qft_unitary(1).matrix(), gates::hadamard().matrix()), kTight);
  EXPECT_THROW(qft_unitary(0), std::invalid_argument);
}

TEST(Qft, InverseRoundTripUpToSixQubits) {
  for (std::size_t n = 1; n <= 6; ++n) {
    const Matrix prod = qft_unitary(n).matrix() * qft_unitary(n, true).matrix();
    EXPECT_LT(max_abs_diff(prod, Matrix::identity(std::size_t{1} << n)), 1e-12) << n;
  }
}

TEST(Qft, InverseOfPhaseStateIsPointMass) {
  // phi(5) on 3 qubits: amplitudes e^{2 pi i 5 k / 8} / sqrt(8).
  const std::size_t n = 3;
  std::vector<Complex> amps(8);
  for (std::size_t k = 0; k < 8; ++k) {
    amps[k] = std::polar(1.0 / std::sqrt(8.0), 2 * std::numbers::pi * 5.0 * k / 8.0);
  }
  const auto out = apply_unitary(DensityMatrix::pure(amps), qft_unitary(n, true), idx({0, 1, 2}));
  EXPECT_NEAR(measurement_distribution(out)[0b101], 1.0, 1e-12);
}

TEST(Qft, CircuitFormMatchesDenseUnitary) {
  std::mt19937_64 rng(4);
  for (std::size_t n = 1; n <= 5; ++n) {
    const auto rho = oracle::random_state(n + 1, rng);
    std::vector<std::size_t> targets(n);
    for (std::size_t q = 0; q < n; ++q) targets[q] = q + 1;
    for (bool inverse : {false, true}) {
      const auto a = apply_qft(rho, targets, inverse);
      const auto b = apply_unitary(rho, qft_unitary(n, inverse), targets);
      EXPECT_LT(max_abs_diff(a.matrix(), b.matrix()), 1e-12) << n << inverse;
    }
  }
}

TEST(ControlledPhase, SpecialAngles) {
  const auto quarter = controlled_phase(std::numbers::pi / 2).matrix();
  EXPECT_NEAR(std::abs(quarter(3, 3) - Complex(0.0, 1.0)), 0.0, kTight);
  EXPECT_LT(max_abs_diff(controlled_phase(0.0).matrix(), Matrix::identity(4)), kTight);
  Matrix cz = Matrix::identity(4);
  cz(3, 3) = -1.0;
  EXPECT_LT(max_abs_diff(controlled_phase(std::numbers::pi).matrix(), cz), kTight);
}

TEST(Measurement, Distributions) {
  const auto plus = apply_unitary(DensityMatrix::basis(1, 0), gates::hadamard(), idx({0}));
  const auto d = measurement_distribution(plus);
  EXPECT_NEAR(d[0], 0.5, kTight);
  EXPECT_NEAR(d[1], 0.5, kTight);
  EXPECT_NEAR(measurement_distribution(DensityMatrix::basis(3, 5))[5], 1.0, kTight);
  const auto u = measurement_distribution(DensityMatrix::maximally_mixed(3));
  for (std::size_t x = 0; x < 8; ++x) EXPECT_NEAR(u[x], 0.125, kTight);
}

TEST(Measurement, ProbabilityDistributionValidates) {
  EXPECT_THROW(ProbabilityDistribution({0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(ProbabilityDistribution({-0.1, 1.1}), std::invalid_argument);
  EXPECT_NO_THROW(ProbabilityDistribution({0.25, 0.75}));
}

TEST(ProjectMeasure, DeterministicAndCollapsing) {
  Rng rng(1);
  const auto [bit, post] = project_measure(DensityMatrix::basis(1, 1), 0, rng);
  EXPECT_EQ(bit, 1);
  EXPECT_LT(max_abs_diff(post.matrix(), DensityMatrix::basis(1, 1).matrix()), kTight);

  const double h = 1.0 / std::numbers::sqrt2;
  const Complex bell[] = {h, 0.0, 0.0, h};
  const auto bell_rho = DensityMatrix::pure(bell);
  for (int trial = 0; trial < 20; ++trial) {
    const auto [b, state] = project_measure(bell_rho, 0, rng);
    const auto second = partial_trace(state, idx({1}));
    EXPECT_NEAR(second(b, b).real(), 1.0, kTight);
  }
}

TEST(ProjectMeasure, FixedSeedReproducesOutcomes) {
  const auto rho = DensityMatrix::maximally_mixed(2);
  auto run = [&](std::uint64_t seed) {
    Rng rng(seed);
    std::vector<int> bits;
    for (int i = 0; i < 32; ++i) bits.push_back(project_measure(rho, i % 2, rng).first);
    return bits;
  };
  EXPECT_EQ(run(42), run(42));
  EXPECT_NE(run(42), run(43));
}

TEST(Invariants, TraceHermiticityPsdAfterRandomCircuits) {
  std::mt19937_64 rng(21);
  auto rho = oracle::random_state(4, rng);
  const KrausChannel amp({Matrix{{1.0, 0.0}, {0.0, std::sqrt(0.7)}},
                          Matrix{{0.0, std::sqrt(0.3)}, {0.0, 0.0}}});
  for (int step = 0; step < 30; ++step) {
    const std::size_t a = step % 4;
    const std::size_t b = (step * 3 + 1) % 4;
    if (a != b) rho = apply_unitary(std::move(rho), Unitary(oracle::random_unitary(4, rng)),
                                    std::vector<std::size_t>{a, b});
    rho = apply_kraus(std::move(rho), amp, std::vector<std::size_t>{b});
    EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-10);
    EXPECT_LT(max_abs_diff(rho.matrix(), rho.matrix().adjoint()), 1e-12);
    EXPECT_TRUE(rho.is_positive_semidefinite());
  }
}

TEST(DensityMatrix, RejectsInvalidInput) {
  EXPECT_THROW(DensityMatrix(Matrix{{1.0, 0.1}, {0.0, 0.0}}), std::invalid_argument);
  EXPECT_THROW(DensityMatrix(Matrix{{0.6, 0.0}, {0.0, 0.6}}), std::invalid_argument);
  EXPECT_THROW(DensityMatrix(Matrix{{NAN, 0.0}, {0.0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(DensityMatrix::basis(0, 0), std::invalid_argument);
  EXPECT_FALSE(DensityMatrix(Matrix{{1.5, 0.0}, {0.0, -0.5}}).is_positive_semidefinite());
}

}  // namespace
}  // namespace dqa
