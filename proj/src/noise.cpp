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

#include "dqa/noise.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace dqa {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::none:
      return "none";
    case NoiseKind::dephasing:
      return "dephasing";
    case NoiseKind::depolarising:
      return "depolarising";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(std::string_view text) {
  if (text == "none") return NoiseKind::none;
  if (text == "dephasing") return NoiseKind::dephasing;
  if (text == "depolarising" || text == "depolarizing") return NoiseKind::depolarising;
  throw std::invalid_argument("unknown noise kind '" + std::string(text) + "'");
}

NoiseModel NoiseModel::dephasing(double p) {
  NoiseModel m{NoiseKind::dephasing, p};
  m.validate();
  return m;
}

NoiseModel NoiseModel::depolarising(double p) {
  NoiseModel m{NoiseKind::depolarising, p};
  m.validate();
  return m;
}

void NoiseModel::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("noise parameter p=" + std::to_string(p) +
                                " outside [0, 1]");
  }
}

KrausChannel dephasing_channel(double p) {
  NoiseModel{NoiseKind::dephasing, p}.validate();
  const double keep = std::sqrt(1.0 - p / 2.0);
  const double flip = std::sqrt(p / 2.0);
  return KrausChannel({keep * gates::identity(1).matrix(), flip * gates::pauli_z().matrix()});
}

KrausChannel depolarising_channel(double p) {
  NoiseModel{NoiseKind::depolarising, p}.validate();
  const double keep = std::sqrt(1.0 - 3.0 * p / 4.0);
  const double flip = std::sqrt(p / 4.0);
  return KrausChannel({keep * gates::identity(1).matrix(), flip * gates::pauli_x().matrix(),
                       flip * gates::pauli_y().matrix(), flip * gates::pauli_z().matrix()});
}

KrausChannel single_qubit_channel(const NoiseModel& model) {
  model.validate();
  switch (model.kind) {
    case NoiseKind::dephasing:
      return dephasing_channel(model.p);
    case NoiseKind::depolarising:
      return depolarising_channel(model.p);
    case NoiseKind::none:
      break;
  }
  return KrausChannel({gates::identity(1).matrix()});
}

DensityMatrix apply_link_noise(DensityMatrix rho, std::span<const std::size_t> ghz_qubits,
                               const NoiseModel& model) {
  model.validate();
  if (model.is_identity()) return rho;
  const KrausChannel ch = single_qubit_channel(model);
  for (std::size_t q : ghz_qubits) {
    const std::size_t target[] = {q};
    rho = apply_kraus(std::move(rho), ch, target);
  }
  return rho;
}

StateVector apply_link_noise_sampled(StateVector psi,
                                     std::span<const std::size_t> ghz_qubits,
                                     const NoiseModel& model, Rng& rng) {
  model.validate();
  if (model.is_identity()) return psi;
  const KrausChannel ch = single_qubit_channel(model);
  for (std::size_t q : ghz_qubits) {
    const std::size_t target[] = {q};
    psi = apply_kraus_sampled(std::move(psi), ch, target, rng);
  }
  return psi;
}

}  // namespace dqa
