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


// Threshold Shamir secret sharing over GF(q).
//
// A secret X is hidden as g(0) of a random polynomial of degree t - 1 whose
// higher coefficients are all nonzero. Any t evaluations g(x_j) at distinct
// nonzero points recover X by Lagrange interpolation at zero.

#ifndef DQA_SSS_HPP_
#define DQA_SSS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dqa/qkernel.hpp"

namespace dqa {

// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime(std::uint64_t value);

class PrimeField {
 public:
  static constexpr std::uint64_t kMaxModulus = std::uint64_t{1} << 61;

  // Throws ValidationError unless q is a prime below 2^61.
  explicit PrimeField(std::uint64_t q);

  std::uint64_t modulus() const { return q_; }
  bool contains(std::uint64_t x) const { return x < q_; }

  std::uint64_t reduce(std::uint64_t x) const { return x % q_; }
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t pow(std::uint64_t base, std::uint64_t exp) const;
  // Throws std::domain_error for zero.
  std::uint64_t inverse(std::uint64_t a) const;

  friend bool operator==(const PrimeField&, const PrimeField&) = default;

 private:
  std::uint64_t q_;
};

struct Share {
  std::uint64_t point = 0;
  std::uint64_t value = 0;

  friend bool operator==(const Share&, const Share&) = default;
};

class SecretPolynomial {
 public:
  // coefficients[0] is the secret. Throws ValidationError if any
  // coefficient lies outside the field, a higher coefficient is zero, or
  // the list is empty.
  SecretPolynomial(PrimeField field, std::vector<std::uint64_t> coefficients);

  const PrimeField& field() const { return field_; }
  const std::vector<std::uint64_t>& coefficients() const { return coeffs_; }
  std::uint64_t secret() const { return coeffs_.front(); }
  std::size_t threshold() const { return coeffs_.size(); }

  // Horner evaluation mod q.
  std::uint64_t evaluate(std::uint64_t x) const;

 private:
  PrimeField field_;
  std::vector<std::uint64_t> coeffs_;
};

// c_0 = secret, c_1..c_{t-1} uniform on {1, ..., q - 1}.
SecretPolynomial gen_polynomial(std::uint64_t secret, std::size_t t, const PrimeField& field,
                                Rng& rng);

// Rejects zero, duplicate or out-of-field points.
std::vector<Share> eval_shares(const SecretPolynomial& poly, std::span<const std::uint64_t> points);

// Interpolates the first t shares at zero. Throws ValidationError for fewer
// than t shares, t == 0, or zero, duplicate or out-of-field points.
std::uint64_t reconstruct(std::span<const Share> shares, std::size_t t, const PrimeField& field);

}  // namespace dqa

#endif  // DQA_SSS_HPP_
