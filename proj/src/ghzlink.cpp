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

#include "dqa/ghzlink.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace dqa {
namespace {

std::vector<Complex> ghz_amplitudes(std::size_t size) {
  std::vector<Complex> amps(std::size_t{1} << size);
  amps.front() = std::numbers::sqrt2 / 2.0;
  amps.back() = std::numbers::sqrt2 / 2.0;
  return amps;
}

void check_ghz_size(std::size_t size) {
  if (size < 2) throw std::invalid_argument("GHZ resource needs at least 2 qubits");
}

void check_layout(std::size_t num_qubits, std::size_t server,
                  std::span<const std::size_t> parties, std::size_t ghz_size) {
  if (parties.empty()) throw std::invalid_argument("fan-out needs at least one party");
  if (ghz_size != parties.size() + 1) {
    throw std::invalid_argument("GHZ size " + std::to_string(ghz_size) +
                                " does not match " + std::to_string(parties.size()) +
                                " parties + server");
  }
  std::vector<bool> used(num_qubits, false);
  auto claim = [&](std::size_t q) {
    if (q >= num_qubits) throw std::invalid_argument("qubit index out of range");
    if (used[q]) throw std::invalid_argument("server and party qubits must be distinct");
    used[q] = true;
  };
  claim(server);
  for (std::size_t p : parties) claim(p);
}

// Removes one qubit from a register in which it is (at least) a product
// factor, or traces it out in general.
DensityMatrix drop_qubit(const DensityMatrix& rho, std::size_t qubit) {
  std::vector<std::size_t> keep(rho.num_qubits() - 1);
  std::iota(keep.begin(), keep.begin() + static_cast<std::ptrdiff_t>(qubit), 0);
  std::iota(keep.begin() + static_cast<std::ptrdiff_t>(qubit), keep.end(), qubit + 1);
  return partial_trace(rho, keep);
}

// Correction policies. Each hook handles one measurement of the protocol
// and removes the measured GHZ qubit from the state.
//
// `entangle_correction` measures g0 and conditionally flips every g_i.
// `disentangle_correction` measures g_i and conditionally applies Z to the
// server.

struct DeferredPolicy {
  using State = DensityMatrix;

  void entangle_correction(State& st, std::size_t g0, std::span<const std::size_t> copies,
                           SessionTranscript&) {
    for (std::size_t gi : copies) {
      const std::size_t t[] = {g0, gi};
      st = apply_unitary(std::move(st), gates::cnot(), t);
    }
    st = drop_qubit(st, g0);
  }

  void disentangle_correction(State& st, std::size_t gi, std::size_t server, std::size_t,
                              SessionTranscript&) {
    const std::size_t t[] = {gi, server};
    st = apply_unitary(std::move(st), gates::cz(), t);
    st = drop_qubit(st, gi);
  }
};

// Projective measurement on a density matrix; outcomes are either sampled or
// forced, and the product of branch probabilities is accumulated.
struct MeasuredPolicy {
  using State = DensityMatrix;

  Rng* rng = nullptr;
  std::span<const int> forced;
  std::size_t next = 0;
  double probability = 1.0;

  int measure(State& st, std::size_t q) {
    int bit = 0;
    if (rng != nullptr) {
      auto [b, post] = project_measure(st, q, *rng);
      bit = b;
      st = std::move(post);
    } else {
      if (next >= forced.size()) throw std::invalid_argument("not enough forced outcomes");
      bit = forced[next++];
      auto branch = measure_branch(st, q, bit);
      probability *= branch.probability;
      st = std::move(branch.state);
    }
    return bit;
  }

  void entangle_correction(State& st, std::size_t g0, std::span<const std::size_t> copies,
                           SessionTranscript& tr) {
    const int bit = measure(st, g0);
    if (bit == 1) {
      for (std::size_t gi : copies) {
        const std::size_t t[] = {gi};
        st = apply_unitary(std::move(st), gates::pauli_x(), t);
      }
    }
    st = drop_qubit(st, g0);
    record_entangle(tr, bit, copies.size());
  }

  void disentangle_correction(State& st, std::size_t gi, std::size_t server, std::size_t party,
                              SessionTranscript& tr) {
    const int bit = measure(st, gi);
    if (bit == 1) {
      const std::size_t t[] = {server};
      st = apply_unitary(std::move(st), gates::pauli_z(), t);
    }
    st = drop_qubit(st, gi);
    record_disentangle(tr, bit, party);
  }

  static void record_entangle(SessionTranscript& tr, int bit, std::size_t parties) {
    tr.messages.push_back({0, LinkRound::entangle, bit});
    std::vector<std::size_t> receivers(parties);
    std::iota(receivers.begin(), receivers.end(), std::size_t{1});
    tr.corrections.push_back({tr.messages.size() - 1, 'X', std::move(receivers), bit == 1});
  }

  static void record_disentangle(SessionTranscript& tr, int bit, std::size_t party) {
    tr.messages.push_back({party, LinkRound::disentangle, bit});
    tr.corrections.push_back({tr.messages.size() - 1, 'Z', {0}, bit == 1});
  }
};

struct PurePolicy {
  using State = StateVector;

  Rng* rng = nullptr;

  void entangle_correction(State& st, std::size_t g0, std::span<const std::size_t> copies,
                           SessionTranscript& tr) {
    auto [bit, post] = measure_and_discard(std::move(st), g0, *rng);
    st = std::move(post);
    if (bit == 1) {
      for (std::size_t gi : copies) {
        // g0 has been removed, so every later index shifts down by one.
        const std::size_t t[] = {gi > g0 ? gi - 1 : gi};
        st = apply_unitary(std::move(st), gates::pauli_x(), t);
      }
    }
    MeasuredPolicy::record_entangle(tr, bit, copies.size());
  }

  void disentangle_correction(State& st, std::size_t gi, std::size_t server, std::size_t party,
                              SessionTranscript& tr) {
    auto [bit, post] = measure_and_discard(std::move(st), gi, *rng);
    st = std::move(post);
    if (bit == 1) {
      const std::size_t t[] = {server};
      st = apply_unitary(std::move(st), gates::pauli_z(), t);
    }
    MeasuredPolicy::record_disentangle(tr, bit, party);
  }
};

// The protocol proper. `ghz` is appended after the register, so g0 sits at
// index N and g_i at N + i. DeferredPolicy and MeasuredPolicy drop g0 after
// the entangle correction (indices of g_i shift down by one); PurePolicy
// handles its own index shift for the X corrections and then matches.
template <class Policy>
typename Policy::State run_fanout(typename Policy::State reg, std::size_t server,
                                  const typename Policy::State& ghz,
                                  std::span<const std::size_t> parties, Policy& policy,
                                  SessionTranscript& tr) {
  const std::size_t n = reg.num_qubits();
  const std::size_t m = parties.size();
  auto st = tensor(reg, ghz);
  const std::size_t g0 = n;

  {
    const std::size_t t[] = {server, g0};
    st = apply_unitary(std::move(st), gates::cnot(), t);
  }
  std::vector<std::size_t> copies(m);
  std::iota(copies.begin(), copies.end(), g0 + 1);
  policy.entangle_correction(st, g0, copies, tr);

  // After g0 is gone, party i's GHZ qubit is at n + i - 1 (i is 1-based).
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t gi = n + i;
    const std::size_t cx[] = {gi, parties[i]};
    st = apply_unitary(std::move(st), gates::cnot(), cx);
    const std::size_t h[] = {gi};
    st = apply_unitary(std::move(st), gates::hadamard(), h);
  }
  // Measure from the last GHZ qubit backwards so earlier indices stay put.
  for (std::size_t i = m; i-- > 0;) {
    policy.disentangle_correction(st, n + i, server, i + 1, tr);
  }
  return st;
}

void reorder_disentangle(SessionTranscript& tr, std::size_t first) {
  // Disentangle messages were produced last party first; present them in
  // party order.
  std::vector<std::pair<ClassicalMessage, CorrectionRecord>> tail;
  for (std::size_t i = first; i < tr.messages.size(); ++i) {
    tail.emplace_back(tr.messages[i], tr.corrections[i]);
  }
  std::reverse(tail.begin(), tail.end());
  for (std::size_t k = 0; k < tail.size(); ++k) {
    tr.messages[first + k] = tail[k].first;
    tr.corrections[first + k] = tail[k].second;
    tr.corrections[first + k].message = first + k;
  }
}

void require_fresh(const DensityMatrix& reg, std::span<const std::size_t> parties) {
  for (std::size_t p : parties) {
    if (probability_of_one(reg, p) > kTraceTolerance) {
      throw std::invalid_argument("party qubit " + std::to_string(p) + " is not in |0>");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------

GhzResource generate_noisy_ghz(std::size_t size, const NoiseModel& model) {
  check_ghz_size(size);
  model.validate();
  const auto amps = ghz_amplitudes(size);
  DensityMatrix rho = DensityMatrix::pure(amps);
  std::vector<std::size_t> all(size);
  std::iota(all.begin(), all.end(), 0);
  rho = apply_link_noise(std::move(rho), all, model);
  return GhzResource{size, std::move(rho), model};
}

StateVector sample_noisy_ghz(std::size_t size, const NoiseModel& model, Rng& rng) {
  check_ghz_size(size);
  StateVector psi(ghz_amplitudes(size));
  std::vector<std::size_t> all(size);
  std::iota(all.begin(), all.end(), 0);
  return apply_link_noise_sampled(std::move(psi), all, model, rng);
}

void SessionTranscript::append(const SessionTranscript& other) {
  const std::size_t offset = messages.size();
  messages.insert(messages.end(), other.messages.begin(), other.messages.end());
  for (auto c : other.corrections) {
    c.message += offset;
    corrections.push_back(std::move(c));
  }
  deferred = deferred || other.deferred;
}

std::string SessionTranscript::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["deferred"] = deferred;
  j["messages"] = nlohmann::json::array();
  for (const auto& m : messages) {
    j["messages"].push_back({{"sender", m.sender},
                             {"round", m.round == LinkRound::entangle ? "entangle" : "disentangle"},
                             {"bit", m.bit}});
  }
  j["corrections"] = nlohmann::json::array();
  for (const auto& c : corrections) {
    j["corrections"].push_back({{"message", c.message},
                                {"gate", std::string(1, c.gate)},
                                {"receivers", c.receivers},
                                {"applied", c.applied}});
  }
  return j.dump();
}

FanoutResult nonlocal_fanout(DensityMatrix reg, std::size_t server, const GhzResource& ghz,
                             std::span<const std::size_t> party_qubits) {
  check_layout(reg.num_qubits(), server, party_qubits, ghz.size);
  DeferredPolicy policy;
  SessionTranscript tr;
  tr.deferred = true;
  auto st = run_fanout(std::move(reg), server, ghz.state, party_qubits, policy, tr);
  return {std::move(st), std::move(tr), 1.0};
}

FanoutResult nonlocal_fanout(DensityMatrix reg, std::size_t server, const GhzResource& ghz,
                             std::span<const std::size_t> party_qubits, Rng& rng) {
  check_layout(reg.num_qubits(), server, party_qubits, ghz.size);
  MeasuredPolicy policy;
  policy.rng = &rng;
  SessionTranscript tr;
  auto st = run_fanout(std::move(reg), server, ghz.state, party_qubits, policy, tr);
  reorder_disentangle(tr, 1);
  return {std::move(st), std::move(tr), 1.0};
}

FanoutResult nonlocal_fanout_branch(DensityMatrix reg, std::size_t server,
                                    const GhzResource& ghz,
                                    std::span<const std::size_t> party_qubits,
                                    std::span<const int> outcomes) {
  check_layout(reg.num_qubits(), server, party_qubits, ghz.size);
  if (outcomes.size() != party_qubits.size() + 1) {
    throw std::invalid_argument("need one forced outcome per GHZ qubit");
  }
  // The protocol measures g0 first and then the parties last to first.
  std::vector<int> order;
  order.push_back(outcomes[0]);
  for (std::size_t i = party_qubits.size(); i > 0; --i) order.push_back(outcomes[i]);
  MeasuredPolicy policy;
  policy.forced = order;
  SessionTranscript tr;
  auto st = run_fanout(std::move(reg), server, ghz.state, party_qubits, policy, tr);
  reorder_disentangle(tr, 1);
  return {std::move(st), std::move(tr), policy.probability};
}

PureFanoutResult nonlocal_fanout(StateVector reg, std::size_t server, StateVector ghz,
                                 std::span<const std::size_t> party_qubits, Rng& rng) {
  check_layout(reg.num_qubits(), server, party_qubits, ghz.num_qubits());
  PurePolicy policy;
  policy.rng = &rng;
  SessionTranscript tr;
  auto st = run_fanout(std::move(reg), server, ghz, party_qubits, policy, tr);
  reorder_disentangle(tr, 1);
  return {std::move(st), std::move(tr)};
}

FanoutResult entangle_fanout(DensityMatrix reg, std::size_t server, const GhzResource& ghz,
                             std::span<const std::size_t> party_qubits) {
  check_layout(reg.num_qubits(), server, party_qubits, ghz.size);
  require_fresh(reg, party_qubits);
  return nonlocal_fanout(std::move(reg), server, ghz, party_qubits);
}

FanoutResult entangle_fanout(DensityMatrix reg, std::size_t server, const GhzResource& ghz,
                             std::span<const std::size_t> party_qubits, Rng& rng) {
  check_layout(reg.num_qubits(), server, party_qubits, ghz.size);
  require_fresh(reg, party_qubits);
  return nonlocal_fanout(std::move(reg), server, ghz, party_qubits, rng);
}

FanoutResult disentangle_fanout(DensityMatrix reg, std::size_t server,
                                std::span<const std::size_t> party_qubits,
                                const GhzResource& ghz) {
  return nonlocal_fanout(std::move(reg), server, ghz, party_qubits);
}

FanoutResult disentangle_fanout(DensityMatrix reg, std::size_t server,
                                std::span<const std::size_t> party_qubits,
                                const GhzResource& ghz, Rng& rng) {
  return nonlocal_fanout(std::move(reg), server, ghz, party_qubits, rng);
}

// ---------------------------------------------------------------------------

FanoutSession::FanoutSession(DensityMatrix reg, std::size_t server,
                             std::vector<std::size_t> party_qubits)
    : state_(std::move(reg)), server_(server), parties_(std::move(party_qubits)) {}

void FanoutSession::record(FanoutResult&& r) {
  state_ = std::move(r.state);
  transcript_.append(r.transcript);
}

void FanoutSession::entangle(const GhzResource& ghz) {
  if (stage_ != Stage::fresh) throw std::logic_error("session already entangled");
  record(entangle_fanout(std::move(state_), server_, ghz, parties_));
  stage_ = Stage::entangled;
}

void FanoutSession::entangle(const GhzResource& ghz, Rng& rng) {
  if (stage_ != Stage::fresh) throw std::logic_error("session already entangled");
  record(entangle_fanout(std::move(state_), server_, ghz, parties_, rng));
  stage_ = Stage::entangled;
}

void FanoutSession::apply_party_phase(std::size_t party, double angle) {
  if (stage_ != Stage::entangled) {
    throw std::logic_error("party phases require an entangled session");
  }
  if (party >= parties_.size()) throw std::invalid_argument("party index out of range");
  const std::size_t t[] = {parties_[party]};
  state_ = apply_unitary(std::move(state_), gates::phase(angle), t);
}

void FanoutSession::disentangle(const GhzResource& ghz) {
  if (stage_ != Stage::entangled) throw std::logic_error("disentangle before entangle");
  record(disentangle_fanout(std::move(state_), server_, parties_, ghz));
  stage_ = Stage::done;
}

void FanoutSession::disentangle(const GhzResource& ghz, Rng& rng) {
  if (stage_ != Stage::entangled) throw std::logic_error("disentangle before entangle");
  record(disentangle_fanout(std::move(state_), server_, parties_, ghz, rng));
  stage_ = Stage::done;
}

}  // namespace dqa
