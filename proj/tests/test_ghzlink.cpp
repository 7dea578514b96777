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

#include "dqa/ghzlink.hpp"
#include "json.hpp"
#include "oracle.hpp"

namespace dqa {
namespace {

using Idx = std::vector<std::size_t>;

Idx range(std::size_t first, std::size_t count) {
  Idx v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = first + i;
  return v;
}

// Ideal cascade CNOT(server -> p) for every p, applied by the oracle.
Matrix cascade(const Matrix& rho, std::size_t server, const Idx& parties, std::size_t n) {
  Matrix out = rho;
  for (std::size_t p : parties) {
    out = oracle::conjugate(oracle::embed(gates::cnot().matrix(), {server, p}, n), out);
  }
  return out;
}

// Server (qubit 0) in a random pure state, parties in |0>.
DensityMatrix server_with_fresh_parties(std::size_t m, std::mt19937_64& rng) {
  return tensor(oracle::random_state(1, rng, 1), DensityMatrix::basis(m, 0));
}

TEST(Ghz, GenerationExamples) {
  const auto bell = generate_noisy_ghz(2, NoiseModel::none());
  EXPECT_LT(max_abs_diff(bell.state.matrix(), oracle::projector(oracle::ghz_amplitudes(2))), 1e-15);
  const double p = 0.2;
  const auto three = generate_noisy_ghz(3, NoiseModel::dephasing(p));
  EXPECT_NEAR(std::abs(three.state(0, 7)), std::pow(1 - p, 3) / 2, 1e-12);
  const auto mixed = generate_noisy_ghz(2, NoiseModel::depolarising(1.0));
  EXPECT_LT(max_abs_diff(mixed.state.matrix(), DensityMatrix::maximally_mixed(2).matrix()), 1e-15);
  EXPECT_THROW(generate_noisy_ghz(1, NoiseModel::none()), std::invalid_argument);
}

TEST(NonlocalFanout, NoiselessEqualsCascadeOnRandomStates) {
  std::mt19937_64 rng(1);
  Rng traj(2);
  for (std::size_t m = 1; m <= 3; ++m) {
    const std::size_t n = m + 1;
    const auto rho = oracle::random_state(n, rng);
    const auto ghz = generate_noisy_ghz(m + 1, NoiseModel::none());
    const Idx parties = range(1, m);
    const Matrix want = cascade(rho.matrix(), 0, parties, n);
    EXPECT_LT(max_abs_diff(nonlocal_fanout(rho, 0, ghz, parties).state.matrix(), want), 1e-12);
    for (int shot = 0; shot < 4; ++shot) {
      EXPECT_LT(max_abs_diff(nonlocal_fanout(rho, 0, ghz, parties, traj).state.matrix(), want),
                1e-12);
    }
  }
}

TEST(NonlocalFanout, ServerNeedNotBeFirst) {
  std::mt19937_64 rng(3);
  const auto rho = oracle::random_state(3, rng);
  const auto ghz = generate_noisy_ghz(3, NoiseModel::none());
  const Idx parties{0, 1};
  const auto got = nonlocal_fanout(rho, 2, ghz, parties).state;
  EXPECT_LT(max_abs_diff(got.matrix(), cascade(rho.matrix(), 2, parties, 3)), 1e-12);
}

TEST(NonlocalFanout, DeferredMeasurementEqualsBranchAverage) {
  std::mt19937_64 rng(4);
  for (std::size_t m = 1; m <= 2; ++m) {
    for (const auto& model : {NoiseModel::none(), NoiseModel::dephasing(0.3),
                              NoiseModel::depolarising(0.45)}) {
      const auto rho = oracle::random_state(m + 1, rng);
      const auto ghz = generate_noisy_ghz(m + 1, model);
      const Idx parties = range(1, m);
      const auto channel = nonlocal_fanout(rho, 0, ghz, parties).state;
      Matrix avg(channel.dim());
      double total = 0.0;
      for (std::size_t mask = 0; mask < (std::size_t{1} << (m + 1)); ++mask) {
        std::vector<int> outcomes(m + 1);
        for (std::size_t i = 0; i <= m; ++i) outcomes[i] = static_cast<int>((mask >> i) & 1);
        try {
          const auto br = nonlocal_fanout_branch(rho, 0, ghz, parties, outcomes);
          avg = avg + Complex(br.branch_probability) * br.state.matrix();
          total += br.branch_probability;
        } catch (const std::domain_error&) {
          // Zero-weight branch.
        }
      }
      EXPECT_NEAR(total, 1.0, 1e-10);
      EXPECT_LT(max_abs_diff(avg, channel.matrix()), 1e-10) << m << ' ' << model.p;
    }
  }
}

TEST(NonlocalFanout, TrajectoryAverageApproachesChannel) {
  std::mt19937_64 rng(5);
  const auto rho = oracle::random_state(3, rng);
  const auto ghz = generate_noisy_ghz(3, NoiseModel::depolarising(0.3));
  const Idx parties{1, 2};
  Rng traj(6);
  Matrix avg(8);
  const int shots = 4000;
  for (int s = 0; s < shots; ++s) {
    avg = avg + Complex(1.0 / shots) * nonlocal_fanout(rho, 0, ghz, parties, traj).state.matrix();
  }
  EXPECT_LT(max_abs_diff(avg, nonlocal_fanout(rho, 0, ghz, parties).state.matrix()), 0.03);
}

TEST(NonlocalFanout, PureTrajectoryMatchesCascade) {
  Rng rng(7);
  std::mt19937_64 gen(8);
  std::normal_distribution<double> g;
  std::vector<Complex> amps(8);
  double norm = 0.0;
  for (auto& a : amps) norm += std::norm(a = {g(gen), g(gen)});
  for (auto& a : amps) a /= std::sqrt(norm);
  const Idx parties{1, 2};
  const Matrix want = cascade(oracle::projector(amps), 0, parties, 3);
  for (int shot = 0; shot < 8; ++shot) {
    const auto r = nonlocal_fanout(StateVector(amps), 0, StateVector(oracle::ghz_amplitudes(3)),
                                   parties, rng);
    EXPECT_LT(max_abs_diff(oracle::projector(r.state.amplitudes()), want), 1e-12);
    EXPECT_EQ(r.transcript.messages.size(), 3u);
  }
}

TEST(EntangleFanout, ServerOneFlipsAllParties) {
  for (std::size_t m = 1; m <= 3; ++m) {
    const auto reg = DensityMatrix::basis(m + 1, std::size_t{1} << m);  // |1 0..0>
    const auto out = entangle_fanout(reg, 0, generate_noisy_ghz(m + 1, NoiseModel::none()),
                                     range(1, m));
    const std::size_t all_ones = (std::size_t{1} << (m + 1)) - 1;
    EXPECT_NEAR(out.state(all_ones, all_ones).real(), 1.0, 1e-12);
  }
}

TEST(EntangleFanout, ServerPlusBuildsGhz) {
  for (std::size_t m = 1; m <= 3; ++m) {
    auto reg = apply_unitary(DensityMatrix::basis(m + 1, 0), gates::hadamard(), Idx{0});
    const auto out = entangle_fanout(reg, 0, generate_noisy_ghz(m + 1, NoiseModel::none()),
                                     range(1, m));
    EXPECT_LT(max_abs_diff(out.state.matrix(), oracle::projector(oracle::ghz_amplitudes(m + 1))),
              1e-12);
  }
}

TEST(EntangleFanout, FullDepolarisingDecouplesParties) {
  for (std::size_t m = 1; m <= 2; ++m) {
    auto reg = apply_unitary(DensityMatrix::basis(m + 1, 0), gates::hadamard(), Idx{0});
    const auto out = entangle_fanout(reg, 0, generate_noisy_ghz(m + 1, NoiseModel::depolarising(1.0)),
                                     range(1, m));
    // Zero mutual information between server and parties <=> product state.
    const auto server = partial_trace(out.state, Idx{0});
    const auto parties = partial_trace(out.state, range(1, m));
    EXPECT_LT(max_abs_diff(out.state.matrix(), kron(server.matrix(), parties.matrix())), 1e-10);
  }
}

TEST(EntangleFanout, RejectsUsedPartyQubitsAndSizeMismatch) {
  const auto reg = DensityMatrix::basis(3, 0b011);
  EXPECT_THROW(entangle_fanout(reg, 0, generate_noisy_ghz(3, NoiseModel::none()), Idx{1, 2}),
               std::invalid_argument);
  const auto fresh = DensityMatrix::basis(3, 0);
  EXPECT_THROW(entangle_fanout(fresh, 0, generate_noisy_ghz(2, NoiseModel::none()), Idx{1, 2}),
               std::invalid_argument);
  EXPECT_THROW(entangle_fanout(fresh, 0, generate_noisy_ghz(3, NoiseModel::none()), Idx{1, 0}),
               std::invalid_argument);
}

TEST(Session, NoiselessRoundTripIsIdentityOnServer) {
  std::mt19937_64 rng(9);
  for (std::size_t m = 1; m <= 3; ++m) {
    const auto reg = server_with_fresh_parties(m, rng);
    const auto ghz = generate_noisy_ghz(m + 1, NoiseModel::none());
    FanoutSession s(reg, 0, range(1, m));
    s.entangle(ghz);
    s.disentangle(ghz);
    EXPECT_TRUE(s.finished());
    EXPECT_LT(max_abs_diff(s.state().matrix(), reg.matrix()), 1e-12);
  }
}

TEST(Session, PartyPhasesAccumulateOnServer) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
  for (std::size_t m = 1; m <= 3; ++m) {
    const auto reg = server_with_fresh_parties(m, rng);
    const auto ghz = generate_noisy_ghz(m + 1, NoiseModel::none());
    FanoutSession s(reg, 0, range(1, m));
    s.entangle(ghz);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double th = ang(rng);
      total += th;
      s.apply_party_phase(i, th);
    }
    s.disentangle(ghz);
    const auto direct = apply_unitary(reg, gates::phase(total), Idx{0});
    EXPECT_LT(max_abs_diff(s.state().matrix(), direct.matrix()), 1e-12);
  }
}

TEST(Session, DephasingBothRoundsScalesCoherence) {
  for (std::size_t m = 1; m <= 3; ++m) {
    for (double p : {0.05, 0.2}) {
      auto reg = apply_unitary(DensityMatrix::basis(m + 1, 0), gates::hadamard(), Idx{0});
      const auto ghz = generate_noisy_ghz(m + 1, NoiseModel::dephasing(p));
      FanoutSession s(reg, 0, range(1, m));
      s.entangle(ghz);
      s.disentangle(ghz);
      const auto server = partial_trace(s.state(), Idx{0});
      EXPECT_NEAR(2 * std::abs(server(0, 1)), std::pow(1 - p, 2.0 * (m + 1)), 1e-12);
    }
  }
}

TEST(Session, EnforcesCallOrder) {
  const auto ghz = generate_noisy_ghz(2, NoiseModel::none());
  FanoutSession s(DensityMatrix::basis(2, 0), 0, Idx{1});
  EXPECT_THROW(s.apply_party_phase(0, 1.0), std::logic_error);
  EXPECT_THROW(s.disentangle(ghz), std::logic_error);
  s.entangle(ghz);
  EXPECT_THROW(s.entangle(ghz), std::logic_error);
  EXPECT_THROW(s.apply_party_phase(1, 1.0), std::invalid_argument);
  s.disentangle(ghz);
  EXPECT_THROW(s.disentangle(ghz), std::logic_error);
}

TEST(Transcript, OneMessageAndCorrectionPerMeasurement) {
  Rng rng(11);
  for (std::size_t m = 1; m <= 3; ++m) {
    const auto ghz = generate_noisy_ghz(m + 1, NoiseModel::dephasing(0.3));
    auto reg = apply_unitary(DensityMatrix::basis(m + 1, 0), gates::hadamard(), Idx{0});
    const auto one = nonlocal_fanout(reg, 0, ghz, range(1, m), rng);
    ASSERT_EQ(one.transcript.messages.size(), 1 + m);
    ASSERT_EQ(one.transcript.corrections.size(), 1 + m);
    EXPECT_EQ(one.transcript.messages[0].sender, 0u);
    EXPECT_EQ(one.transcript.messages[0].round, LinkRound::entangle);
    for (std::size_t i = 1; i <= m; ++i) {
      const auto& msg = one.transcript.messages[i];
      EXPECT_EQ(msg.sender, i);
      EXPECT_EQ(msg.round, LinkRound::disentangle);
      const auto& c = one.transcript.corrections[i];
      EXPECT_EQ(c.message, i);
      EXPECT_EQ(c.gate, 'Z');
      EXPECT_EQ(c.applied, msg.bit == 1);
    }
    EXPECT_EQ(one.transcript.corrections[0].applied, one.transcript.messages[0].bit == 1);
    EXPECT_EQ(one.transcript.corrections[0].receivers.size(), m);

    FanoutSession s(reg, 0, range(1, m));
    s.entangle(ghz, rng);
    s.disentangle(ghz, rng);
    EXPECT_EQ(s.transcript().messages.size(), 2 * (1 + m));
    for (std::size_t k = 0; k < s.transcript().corrections.size(); ++k) {
      EXPECT_EQ(s.transcript().corrections[k].message, k);
    }
  }
}

TEST(Transcript, ForcedBranchRecordsForcedBits) {
  const auto ghz = generate_noisy_ghz(3, NoiseModel::none());
  auto reg = apply_unitary(DensityMatrix::basis(3, 0), gates::hadamard(), Idx{0});
  const int outcomes[] = {1, 0, 1};
  const auto r = nonlocal_fanout_branch(reg, 0, ghz, Idx{1, 2}, outcomes);
  ASSERT_EQ(r.transcript.messages.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(r.transcript.messages[i].bit, outcomes[i]);
  EXPECT_NEAR(r.branch_probability, 0.125, 1e-12);
}

TEST(Transcript, SerializesToJson) {
  Rng rng(12);
  const auto ghz = generate_noisy_ghz(3, NoiseModel::none());
  const auto r = nonlocal_fanout(DensityMatrix::basis(3, 0), 0, ghz, Idx{1, 2}, rng);
  const auto j = nlohmann::json::parse(r.transcript.to_json());
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["messages"].size(), 3u);
  EXPECT_EQ(j["messages"][0]["round"], "entangle");
  EXPECT_EQ(j["corrections"][1]["gate"], "Z");
  const auto deferred = nonlocal_fanout(DensityMatrix::basis(3, 0), 0, ghz, Idx{1, 2});
  EXPECT_TRUE(nlohmann::json::parse(deferred.transcript.to_json())["deferred"].get<bool>());
}

}  // namespace
}  // namespace dqa
