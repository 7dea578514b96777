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

#include "dqa/qkernel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace dqa {

class KernelAccess {
 public:
  static DensityMatrix make(std::size_t num_qubits, Matrix m) {
    return DensityMatrix(num_qubits, std::move(m), true);
  }
  static Matrix& matrix(DensityMatrix& rho) { return rho.matrix_; }
};

namespace {

void check_trace(const Matrix& m, const char* op) {
  const Complex tr = m.trace();
  if (!std::isfinite(tr.real()) || std::abs(tr.real() - 1.0) > kTraceTolerance ||
      std::abs(tr.imag()) > kTraceTolerance) {
    throw std::logic_error(std::string(op) + ": trace drifted to " +
                           std::to_string(tr.real()));
  }
}

// Bit masks for each register position of an operator acting on `targets`.
struct TargetLayout {
  std::vector<std::size_t> offsets;  // offsets[j] for local index j
  std::vector<std::size_t> bases;    // all indices with target bits clear
};

TargetLayout make_layout(std::size_t num_qubits,
                         std::span<const std::size_t> targets) {
  const std::size_t k = targets.size();
  if (k == 0 || k > num_qubits) {
    throw std::invalid_argument("target count does not fit the register");
  }
  std::size_t target_mask = 0;
  std::vector<std::size_t> bit_of_target(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (targets[i] >= num_qubits) {
      throw std::invalid_argument("target qubit " + std::to_string(targets[i]) +
                                  " out of range");
    }
    const std::size_t bit = std::size_t{1} << (num_qubits - 1 - targets[i]);
    if (target_mask & bit) {
      throw std::invalid_argument("duplicate target qubit " +
                                  std::to_string(targets[i]));
    }
    target_mask |= bit;
    bit_of_target[i] = bit;
  }

  TargetLayout layout;
  layout.offsets.resize(std::size_t{1} << k);
  for (std::size_t j = 0; j < layout.offsets.size(); ++j) {
    std::size_t off = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if ((j >> (k - 1 - i)) & 1U) off |= bit_of_target[i];
    }
    layout.offsets[j] = off;
  }

  const std::size_t free_count = std::size_t{1} << (num_qubits - k);
  layout.bases.reserve(free_count);
  const std::size_t dim = std::size_t{1} << num_qubits;
  // Enumerate subsets of the complement mask in increasing order.
  const std::size_t free_mask = (dim - 1) & ~target_mask;
  std::size_t sub = 0;
  do {
    layout.bases.push_back(sub);
    sub = (sub - free_mask) & free_mask;
  } while (sub != 0);
  return layout;
}

// Operator with exactly one nonzero entry per row and column:
// M |sigma(j)> = u_j |j>, i.e. M(j, sigma(j)) = u_j.
struct Monomial {
  std::vector<std::size_t> source;
  std::vector<Complex> factor;
  bool diagonal = true;
};

std::optional<Monomial> as_monomial(const Matrix& op) {
  const std::size_t d = op.dim();
  Monomial mono;
  mono.source.resize(d);
  mono.factor.resize(d);
  std::vector<bool> seen(d, false);
  for (std::size_t j = 0; j < d; ++j) {
    std::size_t hits = 0;
    for (std::size_t l = 0; l < d; ++l) {
      if (op(j, l) != Complex{}) {
        ++hits;
        mono.source[j] = l;
        mono.factor[j] = op(j, l);
      }
    }
    if (hits != 1 || seen[mono.source[j]]) return std::nullopt;
    seen[mono.source[j]] = true;
    mono.diagonal = mono.diagonal && mono.source[j] == j;
  }
  return mono;
}

// For every full register index a: the index it reads from and the factor.
void expand_monomial(const Monomial& mono, const TargetLayout& layout,
                     std::vector<std::size_t>& src, std::vector<Complex>& fac) {
  const std::size_t local = layout.offsets.size();
  src.resize(layout.bases.size() * local);
  fac.resize(src.size());
  for (std::size_t base : layout.bases) {
    for (std::size_t j = 0; j < local; ++j) {
      const std::size_t a = base + layout.offsets[j];
      src[a] = base + layout.offsets[mono.source[j]];
      fac[a] = mono.factor[j];
    }
  }
}

// rho <- M rho M^dagger, M embedded on the layout's targets.
void conjugate_in_place(Matrix& rho, const Matrix& op, const TargetLayout& layout) {
  const std::size_t dim = rho.dim();
  const std::size_t local = op.dim();

  if (const auto mono = as_monomial(op)) {
    std::vector<std::size_t> src;
    std::vector<Complex> fac;
    expand_monomial(*mono, layout, src, fac);
    std::vector<Complex> conj_fac(dim);
    for (std::size_t b = 0; b < dim; ++b) conj_fac[b] = std::conj(fac[b]);
    if (mono->diagonal) {
      for (std::size_t a = 0; a < dim; ++a) {
        Complex* row = &rho(a, 0);
        const Complex fa = fac[a];
        for (std::size_t b = 0; b < dim; ++b) row[b] *= fa * conj_fac[b];
      }
      return;
    }
    // Reused output buffer: large registers would otherwise pay for a fresh
    // zeroed allocation on every gate.
    thread_local Matrix scratch;
    if (scratch.dim() != dim) scratch = Matrix(dim);
    const bool plain = std::all_of(fac.begin(), fac.end(),
                                   [](const Complex& z) { return z == Complex{1.0}; });
    for (std::size_t a = 0; a < dim; ++a) {
      const Complex* in_row = &rho(src[a], 0);
      Complex* out_row = &scratch(a, 0);
      if (plain) {
        for (std::size_t b = 0; b < dim; ++b) out_row[b] = in_row[src[b]];
      } else {
        const Complex fa = fac[a];
        for (std::size_t b = 0; b < dim; ++b) out_row[b] = fa * conj_fac[b] * in_row[src[b]];
      }
    }
    std::swap(rho, scratch);
    return;
  }

  std::vector<Complex*> rows(local);
  std::vector<Complex> in(local);

  // Left multiplication: rows mix.
  for (std::size_t base : layout.bases) {
    for (std::size_t j = 0; j < local; ++j) {
      rows[j] = &rho(base + layout.offsets[j], 0);
    }
    if (local == 2) {
      const Complex m00 = op(0, 0), m01 = op(0, 1), m10 = op(1, 0), m11 = op(1, 1);
      Complex* r0 = rows[0];
      Complex* r1 = rows[1];
      for (std::size_t c = 0; c < dim; ++c) {
        const Complex x = r0[c];
        const Complex y = r1[c];
        r0[c] = m00 * x + m01 * y;
        r1[c] = m10 * x + m11 * y;
      }
      continue;
    }
    for (std::size_t c = 0; c < dim; ++c) {
      for (std::size_t l = 0; l < local; ++l) in[l] = rows[l][c];
      for (std::size_t j = 0; j < local; ++j) {
        Complex acc = 0.0;
        for (std::size_t l = 0; l < local; ++l) acc += op(j, l) * in[l];
        rows[j][c] = acc;
      }
    }
  }
  // Right multiplication by the adjoint: columns mix.
  for (std::size_t r = 0; r < dim; ++r) {
    Complex* row = &rho(r, 0);
    if (local == 2) {
      const Complex m00 = std::conj(op(0, 0)), m01 = std::conj(op(0, 1));
      const Complex m10 = std::conj(op(1, 0)), m11 = std::conj(op(1, 1));
      const std::size_t off = layout.offsets[1];
      for (std::size_t base : layout.bases) {
        const Complex x = row[base];
        const Complex y = row[base + off];
        row[base] = m00 * x + m01 * y;
        row[base + off] = m10 * x + m11 * y;
      }
      continue;
    }
    for (std::size_t base : layout.bases) {
      for (std::size_t l = 0; l < local; ++l) in[l] = row[base + layout.offsets[l]];
      for (std::size_t j = 0; j < local; ++j) {
        Complex acc = 0.0;
        for (std::size_t l = 0; l < local; ++l) acc += std::conj(op(j, l)) * in[l];
        row[base + layout.offsets[j]] = acc;
      }
    }
  }
}

void apply_in_place(std::span<Complex> amps, const Matrix& op,
                    const TargetLayout& layout) {
  const std::size_t local = op.dim();
  std::vector<Complex> in(local);
  for (std::size_t base : layout.bases) {
    for (std::size_t l = 0; l < local; ++l) in[l] = amps[base + layout.offsets[l]];
    for (std::size_t j = 0; j < local; ++j) {
      Complex acc = 0.0;
      for (std::size_t l = 0; l < local; ++l) acc += op(j, l) * in[l];
      amps[base + layout.offsets[j]] = acc;
    }
  }
}

void check_operator_fits(std::size_t op_dim, std::size_t target_count) {
  if (op_dim != (std::size_t{1} << target_count)) {
    throw std::invalid_argument("operator dimension " + std::to_string(op_dim) +
                                " does not match " + std::to_string(target_count) +
                                " target qubit(s)");
  }
}

std::size_t bit_for(std::size_t num_qubits, std::size_t qubit) {
  if (qubit >= num_qubits) {
    throw std::invalid_argument("qubit " + std::to_string(qubit) + " out of range");
  }
  return std::size_t{1} << (num_qubits - 1 - qubit);
}

}  // namespace

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

Matrix::Matrix(std::size_t dim, std::vector<Complex> data)
    : dim_(dim), data_(std::move(data)) {
  if (data_.size() != dim_ * dim_) {
    throw std::invalid_argument("matrix data size does not match dimension");
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : dim_(rows.size()) {
  data_.reserve(dim_ * dim_);
  for (const auto& row : rows) {
    if (row.size() != dim_) throw std::invalid_argument("matrix must be square");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

Matrix Matrix::identity(std::size_t dim) {
  Matrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const Complex> diag) {
  Matrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Matrix Matrix::adjoint() const {
  Matrix out(dim_);
  for (std::size_t r = 0; r < dim_; ++r) {
    for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
  }
  return out;
}

Complex Matrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.dim_ != b.dim_) throw std::invalid_argument("matrix dimension mismatch");
  const std::size_t d = a.dim_;
  Matrix out(d);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t k = 0; k < d; ++k) {
      const Complex ark = a(r, k);
      if (ark == Complex{}) continue;
      for (std::size_t c = 0; c < d; ++c) out(r, c) += ark * b(k, c);
    }
  }
  return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.dim_ != b.dim_) throw std::invalid_argument("matrix dimension mismatch");
  Matrix out = a;
  for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] += b.data_[i];
  return out;
}

Matrix operator*(Complex s, const Matrix& a) {
  Matrix out = a;
  for (auto& z : out.data_) z *= s;
  return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  const std::size_t da = a.dim();
  const std::size_t db = b.dim();
  Matrix out(da * db);
  for (std::size_t ra = 0; ra < da; ++ra) {
    for (std::size_t ca = 0; ca < da; ++ca) {
      const Complex s = a(ra, ca);
      if (s == Complex{}) continue;
      for (std::size_t rb = 0; rb < db; ++rb) {
        Complex* dst = &out(ra * db + rb, ca * db);
        const Complex* src = &b(rb, 0);
        for (std::size_t cb = 0; cb < db; ++cb) dst[cb] = s * src[cb];
      }
    }
  }
  return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("matrix dimension mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  }
  return worst;
}

std::size_t qubits_for_dimension(std::size_t dim) {
  if (dim < 2 || (dim & (dim - 1)) != 0) {
    throw std::invalid_argument("dimension " + std::to_string(dim) +
                                " is not a power of two >= 2");
  }
  return static_cast<std::size_t>(std::countr_zero(dim));
}

// ---------------------------------------------------------------------------
// Unitary, KrausChannel

Unitary::Unitary(Matrix m) : matrix_(std::move(m)) {
  num_qubits_ = qubits_for_dimension(matrix_.dim());
  const double err =
      max_abs_diff(matrix_ * matrix_.adjoint(), Matrix::identity(matrix_.dim()));
  if (!(err <= kUnitaryTolerance)) {
    throw std::invalid_argument("matrix is not unitary (deviation " +
                                std::to_string(err) + ")");
  }
}

Unitary Unitary::adjoint() const { return Unitary(matrix_.adjoint()); }

KrausChannel::KrausChannel(std::vector<Matrix> operators)
    : operators_(std::move(operators)) {
  if (operators_.empty()) throw std::invalid_argument("Kraus channel has no operators");
  const std::size_t dim = operators_.front().dim();
  num_qubits_ = qubits_for_dimension(dim);
  Matrix sum(dim);
  for (const auto& k : operators_) {
    if (k.dim() != dim) throw std::invalid_argument("Kraus operators differ in dimension");
    sum = sum + k.adjoint() * k;
  }
  const double err = max_abs_diff(sum, Matrix::identity(dim));
  if (!(err <= kKrausTolerance)) {
    throw std::invalid_argument("Kraus operators are not complete (deviation " +
                                std::to_string(err) + ")");
  }
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(std::size_t num_qubits, Matrix m, bool)
    : matrix_(std::move(m)), num_qubits_(num_qubits) {}

DensityMatrix::DensityMatrix(Matrix m) : matrix_(std::move(m)) {
  num_qubits_ = qubits_for_dimension(matrix_.dim());
  if (!matrix_.all_finite()) throw std::invalid_argument("density matrix has non-finite entries");
  const double herm = max_abs_diff(matrix_, matrix_.adjoint());
  if (herm > kHermitianTolerance) {
    throw std::invalid_argument("density matrix is not Hermitian");
  }
  const Complex tr = matrix_.trace();
  if (std::abs(tr - Complex{1.0}) > kTraceTolerance) {
    throw std::invalid_argument("density matrix trace is " + std::to_string(tr.real()));
  }
}

DensityMatrix DensityMatrix::basis(std::size_t num_qubits, std::uint64_t index) {
  if (num_qubits == 0) throw std::invalid_argument("register needs at least one qubit");
  const std::size_t dim = std::size_t{1} << num_qubits;
  if (index >= dim) throw std::invalid_argument("basis index out of range");
  Matrix m(dim);
  m(index, index) = 1.0;
  return KernelAccess::make(num_qubits, std::move(m));
}

DensityMatrix DensityMatrix::pure(std::span<const Complex> amplitudes) {
  const std::size_t dim = amplitudes.size();
  const std::size_t n = qubits_for_dimension(dim);
  double norm = 0.0;
  for (const auto& z : amplitudes) norm += std::norm(z);
  if (std::abs(norm - 1.0) > kTraceTolerance) {
    throw std::invalid_argument("state vector is not normalized");
  }
  Matrix m(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) m(r, c) = amplitudes[r] * std::conj(amplitudes[c]);
  }
  return KernelAccess::make(n, std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t num_qubits) {
  if (num_qubits == 0) throw std::invalid_argument("register needs at least one qubit");
  const std::size_t dim = std::size_t{1} << num_qubits;
  Matrix m = (1.0 / static_cast<double>(dim)) * Matrix::identity(dim);
  return KernelAccess::make(num_qubits, std::move(m));
}

bool DensityMatrix::is_positive_semidefinite(double tol) const {
  const auto d = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXcd m(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) m(r, c) = matrix_(r, c);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff() >= -tol;
}

// ---------------------------------------------------------------------------
// ProbabilityDistribution, StateVector

ProbabilityDistribution::ProbabilityDistribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("empty probability distribution");
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("probability outside [0, 1]");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kTraceTolerance) {
    throw std::invalid_argument("probabilities sum to " + std::to_string(total));
  }
}

StateVector::StateVector(std::size_t num_qubits)
    : num_qubits_(num_qubits), amps_(std::size_t{1} << num_qubits) {
  if (num_qubits == 0) throw std::invalid_argument("register needs at least one qubit");
  amps_[0] = 1.0;
}

StateVector::StateVector(std::vector<Complex> amplitudes) : amps_(std::move(amplitudes)) {
  num_qubits_ = qubits_for_dimension(amps_.size());
  double norm = 0.0;
  for (const auto& z : amps_) norm += std::norm(z);
  if (std::abs(norm - 1.0) > kTraceTolerance) {
    throw std::invalid_argument("state vector is not normalized");
  }
}

// ---------------------------------------------------------------------------
// Gates

namespace gates {

Unitary identity(std::size_t num_qubits) {
  return Unitary(Matrix::identity(std::size_t{1} << num_qubits));
}

Unitary hadamard() {
  const double h = std::numbers::sqrt2 / 2.0;
  return Unitary(Matrix{{h, h}, {h, -h}});
}

Unitary pauli_x() { return Unitary(Matrix{{0.0, 1.0}, {1.0, 0.0}}); }

Unitary pauli_y() {
  return Unitary(Matrix{{0.0, Complex(0.0, -1.0)}, {Complex(0.0, 1.0), 0.0}});
}

Unitary pauli_z() { return Unitary(Matrix{{1.0, 0.0}, {0.0, -1.0}}); }

Unitary phase(double angle) {
  return Unitary(Matrix{{1.0, 0.0}, {0.0, std::polar(1.0, angle)}});
}

Unitary cnot() {
  return Unitary(Matrix{{1.0, 0.0, 0.0, 0.0},
                        {0.0, 1.0, 0.0, 0.0},
                        {0.0, 0.0, 0.0, 1.0},
                        {0.0, 0.0, 1.0, 0.0}});
}

Unitary cz() { return controlled_phase(std::numbers::pi); }

Unitary swap() {
  return Unitary(Matrix{{1.0, 0.0, 0.0, 0.0},
                        {0.0, 0.0, 1.0, 0.0},
                        {0.0, 1.0, 0.0, 0.0},
                        {0.0, 0.0, 0.0, 1.0}});
}

}  // namespace gates

// ---------------------------------------------------------------------------
// Operations

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return KernelAccess::make(a.num_qubits() + b.num_qubits(), kron(a.matrix(), b.matrix()));
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  std::vector<Complex> out;
  out.reserve(a.dim() * b.dim());
  for (const auto& x : a.amplitudes()) {
    for (const auto& y : b.amplitudes()) out.push_back(x * y);
  }
  return StateVector(std::move(out));
}

DensityMatrix apply_unitary(DensityMatrix rho, const Unitary& u,
                            std::span<const std::size_t> targets) {
  check_operator_fits(u.dim(), targets.size());
  const TargetLayout layout = make_layout(rho.num_qubits(), targets);
  Matrix& m = KernelAccess::matrix(rho);
  conjugate_in_place(m, u.matrix(), layout);
  check_trace(m, "apply_unitary");
  return rho;
}

StateVector apply_unitary(StateVector psi, const Unitary& u,
                          std::span<const std::size_t> targets) {
  check_operator_fits(u.dim(), targets.size());
  const TargetLayout layout = make_layout(psi.num_qubits(), targets);
  apply_in_place(psi.amplitudes(), u.matrix(), layout);
  return psi;
}

DensityMatrix apply_kraus(DensityMatrix rho, const KrausChannel& ch,
                          std::span<const std::size_t> targets) {
  check_operator_fits(std::size_t{1} << ch.num_qubits(), targets.size());
  const TargetLayout layout = make_layout(rho.num_qubits(), targets);
  const auto& ops = ch.operators();
  Matrix& m = KernelAccess::matrix(rho);
  if (ops.size() == 1) {
    conjugate_in_place(m, ops.front(), layout);
  } else {
    Matrix acc(m.dim());
    for (const auto& k : ops) {
      Matrix branch = m;
      conjugate_in_place(branch, k, layout);
      auto dst = acc.data();
      auto src = branch.data();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    }
    m = std::move(acc);
  }
  check_trace(m, "apply_kraus");
  return rho;
}

StateVector apply_kraus_sampled(StateVector psi, const KrausChannel& ch,
                                std::span<const std::size_t> targets, Rng& rng) {
  check_operator_fits(std::size_t{1} << ch.num_qubits(), targets.size());
  const TargetLayout layout = make_layout(psi.num_qubits(), targets);
  const auto& ops = ch.operators();
  std::vector<std::vector<Complex>> branches;
  std::vector<double> weights;
  branches.reserve(ops.size());
  for (const auto& k : ops) {
    std::vector<Complex> amps(psi.amplitudes().begin(), psi.amplitudes().end());
    apply_in_place(amps, k, layout);
    double w = 0.0;
    for (const auto& z : amps) w += std::norm(z);
    branches.push_back(std::move(amps));
    weights.push_back(w);
  }
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  const std::size_t chosen = pick(rng);
  auto& amps = branches[chosen];
  const double scale = 1.0 / std::sqrt(weights[chosen]);
  for (auto& z : amps) z *= scale;
  return StateVector(std::move(amps));
}

DensityMatrix partial_trace(const DensityMatrix& rho,
                            std::span<const std::size_t> keep) {
  const std::size_t n = rho.num_qubits();
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  std::vector<bool> kept(n, false);
  for (std::size_t q : keep) {
    if (q >= n) throw std::invalid_argument("partial_trace: qubit out of range");
    if (kept[q]) throw std::invalid_argument("partial_trace: duplicate qubit");
    kept[q] = true;
  }
  std::vector<std::size_t> keep_bits;
  std::vector<std::size_t> trace_bits;
  for (std::size_t q = 0; q < n; ++q) {
    (kept[q] ? keep_bits : trace_bits).push_back(std::size_t{1} << (n - 1 - q));
  }
  auto expand = [](const std::vector<std::size_t>& bits) {
    const std::size_t k = bits.size();
    std::vector<std::size_t> map(std::size_t{1} << k);
    for (std::size_t i = 0; i < map.size(); ++i) {
      std::size_t full = 0;
      for (std::size_t j = 0; j < k; ++j) {
        if ((i >> (k - 1 - j)) & 1U) full |= bits[j];
      }
      map[i] = full;
    }
    return map;
  };
  const auto keep_map = expand(keep_bits);
  const auto trace_map = expand(trace_bits);

  Matrix out(keep_map.size());
  const Matrix& m = rho.matrix();
  for (std::size_t i = 0; i < keep_map.size(); ++i) {
    for (std::size_t j = 0; j < keep_map.size(); ++j) {
      Complex acc = 0.0;
      for (std::size_t t : trace_map) acc += m(keep_map[i] | t, keep_map[j] | t);
      out(i, j) = acc;
    }
  }
  check_trace(out, "partial_trace");
  return KernelAccess::make(keep_bits.size(), std::move(out));
}

Unitary qft_unitary(std::size_t n, bool inverse) {
  if (n == 0) throw std::invalid_argument("qft_unitary: n must be at least 1");
  const std::size_t dim = std::size_t{1} << n;
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
  const double sign = inverse ? -1.0 : 1.0;
  Matrix m(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t k = 0; k < dim; ++k) {
      // Reduce the exponent mod dim so the angle stays exact for large n.
      const std::size_t e = (j * k) % dim;
      const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(e) /
                           static_cast<double>(dim);
      m(j, k) = std::polar(norm, angle);
    }
  }
  return Unitary(std::move(m));
}

DensityMatrix apply_qft(DensityMatrix rho, std::span<const std::size_t> targets, bool inverse) {
  const std::size_t k = targets.size();
  if (k == 0) throw std::invalid_argument("apply_qft: no target qubits");
  struct Step {
    std::size_t a, b;
    int kind;  // 0 = H on a, 1 = controlled phase, 2 = swap
    double angle;
  };
  std::vector<Step> steps;
  for (std::size_t q = 0; q < k; ++q) {
    steps.push_back({q, q, 0, 0.0});
    for (std::size_t j = q + 1; j < k; ++j) {
      const double angle = 2.0 * std::numbers::pi / static_cast<double>(std::size_t{2} << (j - q));
      steps.push_back({q, j, 1, angle});
    }
  }
  for (std::size_t q = 0; q < k / 2; ++q) steps.push_back({q, k - 1 - q, 2, 0.0});
  if (inverse) std::reverse(steps.begin(), steps.end());

  const Unitary h = gates::hadamard();
  const Unitary sw = gates::swap();
  for (const Step& st : steps) {
    if (st.kind == 0) {
      const std::size_t t[] = {targets[st.a]};
      rho = apply_unitary(std::move(rho), h, t);
    } else {
      const std::size_t t[] = {targets[st.a], targets[st.b]};
      rho = apply_unitary(std::move(rho),
                          st.kind == 1 ? controlled_phase(inverse ? -st.angle : st.angle) : sw, t);
    }
  }
  return rho;
}

Unitary controlled_phase(double angle) {
  const Complex diag[] = {1.0, 1.0, 1.0, std::polar(1.0, angle)};
  return Unitary(Matrix::diagonal(diag));
}

ProbabilityDistribution measurement_distribution(const DensityMatrix& rho) {
  std::vector<double> probs(rho.dim());
  double total = 0.0;
  for (std::size_t x = 0; x < rho.dim(); ++x) {
    const double p = rho(x, x).real();
    if (p < -kTraceTolerance) {
      throw std::domain_error("negative diagonal entry " + std::to_string(p));
    }
    probs[x] = std::clamp(p, 0.0, 1.0);
    total += probs[x];
  }
  for (auto& p : probs) p /= total;
  return ProbabilityDistribution(std::move(probs));
}

ProbabilityDistribution measurement_distribution(const StateVector& psi) {
  std::vector<double> probs(psi.dim());
  double total = 0.0;
  for (std::size_t x = 0; x < psi.dim(); ++x) {
    probs[x] = std::norm(psi.amplitudes()[x]);
    total += probs[x];
  }
  for (auto& p : probs) p = std::min(p / total, 1.0);
  return ProbabilityDistribution(std::move(probs));
}

double probability_of_one(const DensityMatrix& rho, std::size_t qubit) {
  const std::size_t bit = bit_for(rho.num_qubits(), qubit);
  double p = 0.0;
  for (std::size_t x = 0; x < rho.dim(); ++x) {
    if (x & bit) p += rho(x, x).real();
  }
  return std::clamp(p, 0.0, 1.0);
}

double probability_of_one(const StateVector& psi, std::size_t qubit) {
  const std::size_t bit = bit_for(psi.num_qubits(), qubit);
  double p = 0.0;
  for (std::size_t x = 0; x < psi.dim(); ++x) {
    if (x & bit) p += std::norm(psi.amplitudes()[x]);
  }
  return std::clamp(p, 0.0, 1.0);
}

MeasurementBranch measure_branch(const DensityMatrix& rho, std::size_t qubit, int bit) {
  if (bit != 0 && bit != 1) throw std::invalid_argument("measurement bit must be 0 or 1");
  const std::size_t mask = bit_for(rho.num_qubits(), qubit);
  const double p1 = probability_of_one(rho, qubit);
  const double prob = bit == 1 ? p1 : 1.0 - p1;
  if (prob <= 0.0) {
    throw std::domain_error("measurement branch has zero probability");
  }
  const std::size_t want = bit == 1 ? mask : 0;
  Matrix out(rho.dim());
  const double scale = 1.0 / prob;
  for (std::size_t r = 0; r < rho.dim(); ++r) {
    if ((r & mask) != want) continue;
    for (std::size_t c = 0; c < rho.dim(); ++c) {
      if ((c & mask) == want) out(r, c) = rho(r, c) * scale;
    }
  }
  return {prob, KernelAccess::make(rho.num_qubits(), std::move(out))};
}

std::pair<int, DensityMatrix> project_measure(const DensityMatrix& rho,
                                              std::size_t qubit, Rng& rng) {
  const double p1 = probability_of_one(rho, qubit);
  std::bernoulli_distribution coin(p1);
  const int bit = coin(rng) ? 1 : 0;
  auto branch = measure_branch(rho, qubit, bit);
  return {bit, std::move(branch.state)};
}

std::pair<int, StateVector> measure_and_discard(StateVector psi, std::size_t qubit,
                                                Rng& rng) {
  const std::size_t n = psi.num_qubits();
  if (n < 2) throw std::invalid_argument("cannot discard the last qubit of a register");
  const std::size_t mask = bit_for(n, qubit);
  const double p1 = probability_of_one(psi, qubit);
  std::bernoulli_distribution coin(p1);
  const int bit = coin(rng) ? 1 : 0;
  const double prob = bit == 1 ? p1 : 1.0 - p1;
  if (prob <= 0.0) throw std::domain_error("measurement branch has zero probability");

  const std::size_t low_mask = mask - 1;
  const double scale = 1.0 / std::sqrt(prob);
  std::vector<Complex> out(psi.dim() / 2);
  const auto amps = psi.amplitudes();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t full = ((i & ~low_mask) << 1) | (i & low_mask) | (bit ? mask : 0);
    out[i] = amps[full] * scale;
  }
  return {bit, StateVector(std::move(out))};
}

}  // namespace dqa
