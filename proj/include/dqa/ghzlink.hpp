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

// GHZ-mediated non-local fan-out CNOT between one server qubit and m party
// qubits living on other devices.
//
// One non-local fan-out CNOT consumes one GHZ_{m+1} resource (qubit 0 held
// by the server, qubit i by party i) and runs in two halves:
//
//   entangle:    CNOT(server -> g0); the server measures g0 and broadcasts
//                the bit; every party applies X to g_i when it is 1. Each
//                g_i now carries a copy of the server's computational value.
//   disentangle: each party applies CNOT(g_i -> p_i) onto its local target,
//                then H on g_i, measures g_i and sends the bit back; the
//                server applies Z for every 1 it receives.
//
// The result is CNOT(server -> p_i) for all i with all GHZ qubits consumed.
// Every half records its messages and correction decisions in a transcript:
// one entangle message plus m disentangle messages per non-local CNOT.
//
// Three evolution forms share this protocol:
//   * channel form (no rng): measurements are deferred, corrections become
//     controlled gates and the GHZ qubits are traced out. Exact.
//   * trajectory form (rng): projective measurements with sampled outcomes.
//   * forced branch: caller-supplied outcomes, returns the branch weight.

#ifndef DQA_GHZLINK_HPP_
#define DQA_GHZLINK_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dqa/noise.hpp"
#include "dqa/qkernel.hpp"

namespace dqa {

struct GhzResource {
  std::size_t size = 0;
  DensityMatrix state;
  NoiseModel noise;
};

// Ideal (|0...0> + |1...1>)/sqrt(2) followed by link noise on every qubit.
// Throws std::invalid_argument for size < 2.
GhzResource generate_noisy_ghz(std::size_t size, const NoiseModel& model);

// Pure GHZ with one sampled noise branch per qubit.
StateVector sample_noisy_ghz(std::size_t size, const NoiseModel& model, Rng& rng);

enum class LinkRound { entangle, disentangle };

struct ClassicalMessage {
  std::size_t sender = 0;  // 0 = server, i = party i (1-based)
  LinkRound round = LinkRound::entangle;
  int bit = 0;
};

struct CorrectionRecord {
  std::size_t message = 0;            // index into SessionTranscript::messages
  char gate = 'X';                    // 'X' at the parties, 'Z' at the server
  std::vector<std::size_t> receivers;  // party ids, 0 = server
  bool applied = false;
};

struct SessionTranscript {
  bool deferred = false;  // channel form: corrections applied coherently
  std::vector<ClassicalMessage> messages;
  std::vector<CorrectionRecord> corrections;

  void append(const SessionTranscript& other);
  std::string to_json() const;
};

struct FanoutResult {
  DensityMatrix state;
  SessionTranscript transcript;
  double branch_probability = 1.0;
};

struct PureFanoutResult {
  StateVector state;
  SessionTranscript transcript;
};

// Non-local fan-out CNOT(server -> party_qubits), channel form. The register
// keeps its qubit count; GHZ qubits are consumed. Throws if the GHZ size is
// not party_qubits.size() + 1 or if indices collide.
FanoutResult nonlocal_fanout(DensityMatrix reg, std::size_t server,
                             const GhzResource& ghz,
                             std::span<const std::size_t> party_qubits);

// Trajectory form with sampled measurement outcomes.
FanoutResult nonlocal_fanout(DensityMatrix reg, std::size_t server,
                             const GhzResource& ghz,
                             std::span<const std::size_t> party_qubits, Rng& rng);

// Forced outcomes: outcomes[0] is the server's entangle bit, outcomes[i] is
// party i's disentangle bit. Returns the normalized branch state and its
// probability. Throws std::domain_error for a zero-probability branch.
FanoutResult nonlocal_fanout_branch(DensityMatrix reg, std::size_t server,
                                    const GhzResource& ghz,
                                    std::span<const std::size_t> party_qubits,
                                    std::span<const int> outcomes);

// Pure-state trajectory form used by the shot sampler.
PureFanoutResult nonlocal_fanout(StateVector reg, std::size_t server, StateVector ghz,
                                 std::span<const std::size_t> party_qubits, Rng& rng);

// Copies the server's value onto fresh |0> party qubits. Throws
// std::invalid_argument if a party qubit is not in |0>.
FanoutResult entangle_fanout(DensityMatrix reg, std::size_t server,
                             const GhzResource& ghz,
                             std::span<const std::size_t> party_qubits);
FanoutResult entangle_fanout(DensityMatrix reg, std::size_t server,
                             const GhzResource& ghz,
                             std::span<const std::size_t> party_qubits, Rng& rng);

// Uncomputes the party copies with a second non-local fan-out CNOT.
FanoutResult disentangle_fanout(DensityMatrix reg, std::size_t server,
                                std::span<const std::size_t> party_qubits,
                                const GhzResource& ghz);
FanoutResult disentangle_fanout(DensityMatrix reg, std::size_t server,
                                std::span<const std::size_t> party_qubits,
                                const GhzResource& ghz, Rng& rng);

// Single-threaded state machine for one server qubit: entangle, local party
// phases, disentangle. Enforces the call order.
class FanoutSession {
 public:
  FanoutSession(DensityMatrix reg, std::size_t server, std::vector<std::size_t> party_qubits);

  void entangle(const GhzResource& ghz);
  void entangle(const GhzResource& ghz, Rng& rng);
  // Diagonal phase e^{i angle} on party `party`'s copy (0-based position).
  void apply_party_phase(std::size_t party, double angle);
  void disentangle(const GhzResource& ghz);
  void disentangle(const GhzResource& ghz, Rng& rng);

  const DensityMatrix& state() const { return state_; }
  DensityMatrix release() && { return std::move(state_); }
  const SessionTranscript& transcript() const { return transcript_; }
  bool finished() const { return stage_ == Stage::done; }

 private:
  enum class Stage { fresh, entangled, done };
  void record(FanoutResult&& r);

  DensityMatrix state_;
  std::size_t server_;
  std::vector<std::size_t> parties_;
  SessionTranscript transcript_;
  Stage stage_ = Stage::fresh;
};

}  // namespace dqa

#endif  // DQA_GHZLINK_HPP_
