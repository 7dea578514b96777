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

#include "dqa/adder.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include "dqa/errors.hpp"
#include "dqa/ghzlink.hpp"

namespace dqa {
namespace {

constexpr std::size_t kDefaultMaxQubits = 12;
constexpr double kColumnAgreement = 1e-9;

NoiseModel second_round_noise(const DqaConfig& c) {
  return c.noisy_rounds == NoisyRounds::both ? c.noise : NoiseModel::none();
}

std::vector<std::size_t> range(std::size_t first, std::size_t count) {
  std::vector<std::size_t> v(count);
  std::iota(v.begin(), v.end(), first);
  return v;
}

// Rng for shot `shot`, independent of the order shots are evaluated in.
Rng shot_rng(std::uint64_t seed, std::uint64_t shot) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(shot), static_cast<std::uint32_t>(shot >> 32)};
  return Rng(seq);
}

std::size_t draw(std::span<const double> cdf, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double x = u(rng);
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

std::vector<double> cumulative(const ProbabilityDistribution& d) {
  std::vector<double> cdf(d.size());
  std::partial_sum(d.probs().begin(), d.probs().end(), cdf.begin());
  return cdf;
}

DensityMatrix zeros(std::size_t count) { return DensityMatrix::basis(count, 0); }

// Exact (1 + m)-qubit column: server at index 0, copies at 1..m.
DensityMatrix run_column(const DqaConfig& c, std::size_t s, const GhzResource& first,
                         const GhzResource& second) {
  const std::size_t m = c.parties();
  DensityMatrix reg = zeros(m + 1);
  const std::size_t server[] = {0};
  reg = apply_unitary(std::move(reg), gates::hadamard(), server);

  FanoutSession session(std::move(reg), 0, range(1, m));
  session.entangle(first);
  for (std::size_t i = 0; i < m; ++i) {
    session.apply_party_phase(i, party_phase_angle(c.inputs[i], s, c.n));
  }
  session.disentangle(second);
  return partial_trace(session.state(), server);
}

// The oracle applies the dense inverse QFT; the factorized engine uses the
// gate decomposition.
OutcomeDistribution finish(const DqaConfig& c, DensityMatrix servers, bool dense) {
  const auto all = range(0, c.n);
  servers = dense ? apply_unitary(std::move(servers), qft_unitary(c.n, /*inverse=*/true), all)
                  : apply_qft(std::move(servers), all, /*inverse=*/true);
  return OutcomeDistribution{c.n, measurement_distribution(servers)};
}

void check_factorized_capacity(const DqaConfig& c) {
  // Column register plus one GHZ resource in flight.
  const std::size_t peak = 2 * (c.parties() + 1);
  if (peak > max_register_qubits()) {
    throw CapacityError("factorized column needs " + std::to_string(peak) +
                        " qubits, limit is " + std::to_string(max_register_qubits()));
  }
  if (c.n > max_register_qubits()) {
    throw CapacityError("server register of " + std::to_string(c.n) +
                        " qubits exceeds limit " + std::to_string(max_register_qubits()));
  }
}

// Pure single-column trajectory; returns the server qubit's state.
StateVector trajectory_column(const DqaConfig& c, std::size_t s, Rng& rng) {
  const std::size_t m = c.parties();
  StateVector reg(m + 1);
  const std::size_t server[] = {0};
  reg = apply_unitary(std::move(reg), gates::hadamard(), server);
  const auto parties = range(1, m);

  auto first = nonlocal_fanout(std::move(reg), 0, sample_noisy_ghz(m + 1, c.noise, rng),
                               parties, rng);
  reg = std::move(first.state);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t t[] = {i + 1};
    reg = apply_unitary(std::move(reg), gates::phase(party_phase_angle(c.inputs[i], s, c.n)), t);
  }
  auto second = nonlocal_fanout(
      std::move(reg), 0, sample_noisy_ghz(m + 1, second_round_noise(c), rng), parties, rng);
  reg = std::move(second.state);
  // Parties discard their copies.
  for (std::size_t i = m; i > 0; --i) reg = measure_and_discard(std::move(reg), i, rng).second;
  return reg;
}

std::vector<DensityMatrix> factorized_columns(const DqaConfig& c) {
  c.validate();
  check_factorized_capacity(c);
  std::vector<DensityMatrix> cols;
  cols.reserve(c.n);
  if (c.noise.is_identity()) {
    // With ideal links every measurement branch of the non-local CNOT ends
    // in the same pure state, so a single trajectory is exact.
    Rng rng(0);
    for (std::size_t s = 0; s < c.n; ++s) {
      cols.push_back(DensityMatrix::pure(trajectory_column(c, s, rng).amplitudes()));
    }
    return cols;
  }
  const GhzResource first = generate_noisy_ghz(c.parties() + 1, c.noise);
  const GhzResource second = generate_noisy_ghz(c.parties() + 1, second_round_noise(c));
  for (std::size_t s = 0; s < c.n; ++s) cols.push_back(run_column(c, s, first, second));
  return cols;
}

}  // namespace

void DqaConfig::validate() const {
  if (inputs.empty()) throw ValidationError("at least one party input is required");
  if (n == 0) throw ValidationError("bit width n must be at least 1");
  if (n > 62) throw ValidationError("bit width n must be at most 62");
  if (engine == Engine::sample && shots == 0) {
    throw ValidationError("sampling needs at least one shot");
  }
  try {
    noise.validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
}

std::vector<double> Histogram::frequencies() const {
  std::vector<double> f(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    f[i] = static_cast<double>(counts[i]) / static_cast<double>(shots);
  }
  return f;
}

std::size_t max_register_qubits() {
  if (const char* env = std::getenv("DQA_MAX_QUBITS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != nullptr && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultMaxQubits;
}

std::uint64_t correct_sum(std::span<const std::uint64_t> inputs, std::size_t n) {
  const std::uint64_t mask = n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  std::uint64_t total = 0;
  for (std::uint64_t t : inputs) total = (total + (t & mask)) & mask;
  return total;
}

std::size_t auto_bit_width(std::span<const std::uint64_t> inputs) {
  std::uint64_t total = 0;
  for (std::uint64_t t : inputs) {
    if (total > ~std::uint64_t{0} - t) throw ValidationError("input sum overflows 64 bits");
    total += t;
  }
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::bit_width(total)));
}

double party_phase_angle(std::uint64_t t, std::size_t s, std::size_t n) {
  if (s >= n) throw std::invalid_argument("column index out of range");
  const std::size_t bits = n - s;
  if (bits >= 64) throw std::invalid_argument("bit width too large");
  const std::uint64_t period = std::uint64_t{1} << bits;
  const std::uint64_t r = t & (period - 1);
  return 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(period);
}

std::string binary_string(std::uint64_t value, std::size_t n) {
  std::string out(n, '0');
  for (std::size_t i = 0; i < n; ++i) {
    if ((value >> i) & 1U) out[n - 1 - i] = '1';
  }
  return out;
}

OutcomeDistribution run_exact_factorized(const DqaConfig& config) {
  auto cols = factorized_columns(config);
  // Column n-1 is the most significant qubit.
  DensityMatrix servers = std::move(cols.back());
  for (std::size_t s = config.n - 1; s-- > 0;) servers = tensor(servers, cols[s]);
  return finish(config, std::move(servers), /*dense=*/false);
}

OutcomeDistribution run_exact_full(const DqaConfig& c) {
  c.validate();
  const std::size_t m = c.parties();
  const std::size_t limit = max_register_qubits();
  const std::size_t reg_qubits = c.n * (m + 1);
  if (reg_qubits > limit) {
    throw CapacityError("full register needs " + std::to_string(reg_qubits) +
                        " qubits, limit is " + std::to_string(limit));
  }
  const GhzResource first = generate_noisy_ghz(m + 1, c.noise);
  const GhzResource second = generate_noisy_ghz(m + 1, second_round_noise(c));

  const auto servers = range(0, c.n);
  DensityMatrix rho = zeros(c.n);
  rho = apply_unitary(std::move(rho), qft_unitary(c.n), servers);
  auto server_of = [&](std::size_t s) { return c.n - 1 - s; };

  // All columns' copies stay alive together when the transient GHZ
  // resource still fits; otherwise columns run one after another.
  const bool interleaved = reg_qubits + m + 1 <= limit;
  if (interleaved) {
    std::vector<std::vector<std::size_t>> copies(c.n);
    for (std::size_t s = 0; s < c.n; ++s) {
      copies[s] = range(rho.num_qubits(), m);
      rho = tensor(rho, zeros(m));
      rho = entangle_fanout(std::move(rho), server_of(s), first, copies[s]).state;
    }
    for (std::size_t s = 0; s < c.n; ++s) {
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t t[] = {copies[s][i]};
        rho = apply_unitary(std::move(rho), gates::phase(party_phase_angle(c.inputs[i], s, c.n)),
                            t);
      }
    }
    for (std::size_t s = 0; s < c.n; ++s) {
      rho = disentangle_fanout(std::move(rho), server_of(s), copies[s], second).state;
    }
    rho = partial_trace(rho, servers);
  } else {
    for (std::size_t s = 0; s < c.n; ++s) {
      const auto copies = range(c.n, m);
      rho = tensor(rho, zeros(m));
      rho = entangle_fanout(std::move(rho), server_of(s), first, copies).state;
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t t[] = {copies[i]};
        rho = apply_unitary(std::move(rho), gates::phase(party_phase_angle(c.inputs[i], s, c.n)),
                            t);
      }
      rho = disentangle_fanout(std::move(rho), server_of(s), copies, second).state;
      rho = partial_trace(rho, servers);
    }
  }
  return finish(c, std::move(rho), /*dense=*/true);
}

OutcomeDistribution run_exact(const DqaConfig& config) {
  return config.engine == Engine::full ? run_exact_full(config) : run_exact_factorized(config);
}

std::vector<std::uint64_t> sample_outcomes(const DqaConfig& c) {
  c.validate();
  if (c.shots == 0) throw ValidationError("sampling needs at least one shot");
  std::vector<std::uint64_t> out(c.shots);

  if (!c.trajectory) {
    DqaConfig exact = c;
    exact.engine = Engine::factorized;
    const auto dist = run_exact_factorized(exact);
    const auto cdf = cumulative(dist.probs);
    for (std::size_t shot = 0; shot < c.shots; ++shot) {
      Rng rng = shot_rng(c.seed, shot);
      out[shot] = draw(cdf, rng);
    }
    return out;
  }

  check_factorized_capacity(c);
  const auto all = range(0, c.n);
  const Unitary iqft = qft_unitary(c.n, /*inverse=*/true);
  for (std::size_t shot = 0; shot < c.shots; ++shot) {
    Rng rng = shot_rng(c.seed, shot);
    std::vector<StateVector> cols;
    cols.reserve(c.n);
    for (std::size_t s = 0; s < c.n; ++s) cols.push_back(trajectory_column(c, s, rng));
    StateVector servers = std::move(cols.back());
    for (std::size_t s = c.n - 1; s-- > 0;) servers = tensor(servers, cols[s]);
    servers = apply_unitary(std::move(servers), iqft, all);
    const auto cdf = cumulative(measurement_distribution(servers));
    out[shot] = draw(cdf, rng);
  }
  return out;
}

Histogram sample(const DqaConfig& c) {
  const auto outcomes = sample_outcomes(c);
  Histogram h{c.n, std::vector<std::uint64_t>(std::size_t{1} << c.n, 0), c.shots};
  for (std::uint64_t x : outcomes) ++h.counts[x];
  return h;
}

DensityMatrix server_qubit_reduced_state(const DqaConfig& c, std::size_t s) {
  c.validate();
  if (s >= c.n) throw std::invalid_argument("column index out of range");
  check_factorized_capacity(c);
  const GhzResource first = generate_noisy_ghz(c.parties() + 1, c.noise);
  const GhzResource second = generate_noisy_ghz(c.parties() + 1, second_round_noise(c));
  return run_column(c, s, first, second);
}

std::vector<double> column_fidelity_params(const DqaConfig& config) {
  const auto cols = factorized_columns(config);
  std::vector<double> a;
  a.reserve(cols.size());
  for (const auto& rho : cols) a.push_back(2.0 * std::abs(rho(0, 1)));
  return a;
}

double fit_fidelity_param(const DqaConfig& config) {
  const auto a = column_fidelity_params(config);
  const auto [lo, hi] = std::minmax_element(a.begin(), a.end());
  if (*hi - *lo > kColumnAgreement) {
    throw std::logic_error("server columns disagree on the fidelity parameter");
  }
  const double mean = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
  return std::clamp(mean, 0.0, 1.0);
}

ExponentFit fit_noise_exponent(NoiseKind kind, std::size_t parties,
                               std::span<const double> p_grid, NoisyRounds rounds) {
  if (parties == 0) throw std::invalid_argument("need at least one party");
  std::vector<std::pair<double, double>> samples;  // (p, a)
  for (double p : p_grid) {
    DqaConfig c;
    c.inputs.assign(parties, 1);
    c.n = 1;
    c.noise = NoiseModel{kind, p};
    c.engine = Engine::full;
    c.noisy_rounds = rounds;
    const auto dist = run_exact_full(c);
    const double a = 2.0 * dist.probs[correct_sum(c.inputs, 1)] - 1.0;
    samples.emplace_back(p, a);
  }
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& [p, a] : samples) {
    if (p <= 0.0 || p >= 1.0 || a <= 0.0) continue;
    const double x = std::log1p(-p);
    sxy += x * std::log(a);
    sxx += x * x;
  }
  if (sxx == 0.0) throw std::invalid_argument("p grid has no interior points");
  ExponentFit fit;
  fit.exponent = sxy / sxx;
  for (const auto& [p, a] : samples) {
    fit.max_residual = std::max(fit.max_residual, std::abs(a - std::pow(1.0 - p, fit.exponent)));
  }
  return fit;
}

}  // namespace dqa
