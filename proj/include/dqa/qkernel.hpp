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

// Dense linear-algebra kernel for small qubit registers.
//
// Qubit ordering is fixed globally: qubit index 0 is the most significant
// bit of the computational-basis integer. For an N-qubit register, qubit q
// corresponds to bit (N - 1 - q) of the basis index.
//
// All transforming functions take their state argument by value and return
// the transformed state, so callers can std::move large registers through a
// pipeline without copies.

#ifndef DQA_QKERNEL_HPP_
#define DQA_QKERNEL_HPP_

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace dqa {

using Complex = std::complex<double>;
using Rng = std::mt19937_64;

inline constexpr double kTraceTolerance = 1e-10;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kUnitaryTolerance = 1e-12;
inline constexpr double kKrausTolerance = 1e-12;
inline constexpr double kPsdTolerance = 1e-10;

// Square complex matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t dim);
  Matrix(std::size_t dim, std::vector<Complex> data);
  Matrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static Matrix identity(std::size_t dim);
  static Matrix diagonal(std::span<const Complex> diag);

  std::size_t dim() const { return dim_; }
  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const {
    return data_[r * dim_ + c];
  }
  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

  Matrix adjoint() const;
  Complex trace() const;
  bool all_finite() const;

  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Matrix operator+(const Matrix& a, const Matrix& b);
  friend Matrix operator*(Complex s, const Matrix& a);

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> data_;
};

Matrix kron(const Matrix& a, const Matrix& b);

// Largest absolute entry of a - b. Dimensions must agree.
double max_abs_diff(const Matrix& a, const Matrix& b);

// Number of qubits n such that dim == 2^n; throws if dim is not a power of
// two or is 1.
std::size_t qubits_for_dimension(std::size_t dim);

class Unitary {
 public:
  // Throws std::invalid_argument unless U U^dagger = I within 1e-12.
  explicit Unitary(Matrix m);

  std::size_t num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return matrix_.dim(); }
  const Matrix& matrix() const { return matrix_; }
  Unitary adjoint() const;

 private:
  Matrix matrix_;
  std::size_t num_qubits_ = 0;
};

class KrausChannel {
 public:
  // Throws std::invalid_argument if operators are empty, mismatched in
  // dimension, or violate sum K^dagger K = I within 1e-12.
  explicit KrausChannel(std::vector<Matrix> operators);

  std::size_t num_qubits() const { return num_qubits_; }
  const std::vector<Matrix>& operators() const { return operators_; }

 private:
  std::vector<Matrix> operators_;
  std::size_t num_qubits_ = 0;
};

class DensityMatrix {
 public:
  // Validates Hermiticity and unit trace. Throws std::invalid_argument.
  explicit DensityMatrix(Matrix m);

  static DensityMatrix basis(std::size_t num_qubits, std::uint64_t index);
  static DensityMatrix pure(std::span<const Complex> amplitudes);
  static DensityMatrix maximally_mixed(std::size_t num_qubits);

  std::size_t num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return matrix_.dim(); }
  const Matrix& matrix() const { return matrix_; }
  Complex operator()(std::size_t r, std::size_t c) const { return matrix_(r, c); }

  // Full invariant check including eigenvalues; O(d^3). Intended for tests.
  bool is_positive_semidefinite(double tol = kPsdTolerance) const;

 private:
  friend class KernelAccess;
  DensityMatrix(std::size_t num_qubits, Matrix m, bool /*trusted*/);

  Matrix matrix_;
  std::size_t num_qubits_ = 0;
};

class ProbabilityDistribution {
 public:
  // Entries must lie in [0, 1] and sum to 1 within 1e-10.
  explicit ProbabilityDistribution(std::vector<double> probs);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

// Pure state used by the per-shot trajectory sampler.
class StateVector {
 public:
  explicit StateVector(std::size_t num_qubits);  // |0...0>
  explicit StateVector(std::vector<Complex> amplitudes);

  std::size_t num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<const Complex> amplitudes() const { return amps_; }
  std::span<Complex> amplitudes() { return amps_; }

 private:
  std::size_t num_qubits_ = 0;
  std::vector<Complex> amps_;
};

// Standard gates.
namespace gates {
Unitary identity(std::size_t num_qubits);
Unitary hadamard();
Unitary pauli_x();
Unitary pauli_y();
Unitary pauli_z();
Unitary phase(double angle);  // diag(1, e^{i angle})
Unitary cnot();               // control = first target, target = second
Unitary cz();
Unitary swap();
}  // namespace gates

// Kronecker product; a's qubits come first (most significant).
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
StateVector tensor(const StateVector& a, const StateVector& b);

// rho <- U rho U^dagger with U embedded on `targets` (targets[0] is the most
// significant qubit of U). Throws on dimension mismatch, duplicate or out of
// range targets.
DensityMatrix apply_unitary(DensityMatrix rho, const Unitary& u,
                            std::span<const std::size_t> targets);
StateVector apply_unitary(StateVector psi, const Unitary& u,
                          std::span<const std::size_t> targets);

// rho <- sum_k K rho K^dagger.
DensityMatrix apply_kraus(DensityMatrix rho, const KrausChannel& ch,
                          std::span<const std::size_t> targets);

// Samples one Kraus branch with probability ||K psi||^2 and renormalizes.
StateVector apply_kraus_sampled(StateVector psi, const KrausChannel& ch,
                                std::span<const std::size_t> targets, Rng& rng);

// Reduced state on `keep`. The kept qubits appear in increasing order of
// their original index. Throws on empty, duplicate or out of range keep.
DensityMatrix partial_trace(const DensityMatrix& rho,
                            std::span<const std::size_t> keep);

// QFT matrix with entries w^{jk} / sqrt(2^n), w = e^{2 pi i / 2^n};
// `inverse` yields the conjugate transpose. Throws for n == 0.
Unitary qft_unitary(std::size_t n, bool inverse = false);

// Applies the same transform as qft_unitary(targets.size(), inverse) on
// `targets` as a circuit of Hadamards, controlled phases and swaps. Costs
// O(k^2) register passes instead of one dense 2^k x 2^k conjugation.
DensityMatrix apply_qft(DensityMatrix rho, std::span<const std::size_t> targets,
                        bool inverse = false);

// diag(1, 1, 1, e^{i angle}).
Unitary controlled_phase(double angle);

// probs[x] = Re(rho_xx). Throws std::domain_error if a diagonal entry is
// below -1e-10.
ProbabilityDistribution measurement_distribution(const DensityMatrix& rho);
ProbabilityDistribution measurement_distribution(const StateVector& psi);

struct MeasurementBranch {
  double probability = 0.0;
  DensityMatrix state;
};

// Projects `qubit` onto |bit> and renormalizes. The measured qubit stays in
// the register. Throws std::domain_error if the branch has zero probability.
MeasurementBranch measure_branch(const DensityMatrix& rho, std::size_t qubit,
                                 int bit);

// Samples a computational-basis measurement of `qubit`.
std::pair<int, DensityMatrix> project_measure(const DensityMatrix& rho,
                                              std::size_t qubit, Rng& rng);

// Measures `qubit` and removes it from the register.
std::pair<int, StateVector> measure_and_discard(StateVector psi,
                                                std::size_t qubit, Rng& rng);

// Probability that `qubit` reads 1.
double probability_of_one(const DensityMatrix& rho, std::size_t qubit);
double probability_of_one(const StateVector& psi, std::size_t qubit);

}  // namespace dqa

#endif  // DQA_QKERNEL_HPP_
