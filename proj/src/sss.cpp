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


#include "dqa/sss.hpp"

#include <random>
#include <set>
#include <stdexcept>
#include <string>

#include "dqa/errors.hpp"

namespace dqa {
namespace {

using u128 = unsigned __int128;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

void check_points(std::span<const Share> shares, const PrimeField& field) {
  std::set<std::uint64_t> seen;
  for (const Share& s : shares) {
    if (s.point == 0) throw ValidationError("share point must be nonzero");
    if (!field.contains(s.point) || !field.contains(s.value)) {
      throw ValidationError("share lies outside the field");
    }
    if (!seen.insert(s.point).second) {
      throw ValidationError("duplicate share point " + std::to_string(s.point));
    }
  }
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r && composite; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) composite = false;
    }
    if (composite) return false;
  }
  return true;
}

PrimeField::PrimeField(std::uint64_t q) : q_(q) {
  if (q >= kMaxModulus) throw ValidationError("field modulus must be below 2^61");
  if (!is_prime(q)) throw ValidationError("field modulus " + std::to_string(q) + " is not prime");
}

std::uint64_t PrimeField::add(std::uint64_t a, std::uint64_t b) const { return (a + b) % q_; }

std::uint64_t PrimeField::sub(std::uint64_t a, std::uint64_t b) const {
  return (a % q_ + q_ - b % q_) % q_;
}

std::uint64_t PrimeField::mul(std::uint64_t a, std::uint64_t b) const { return mulmod(a, b, q_); }

std::uint64_t PrimeField::pow(std::uint64_t base, std::uint64_t exp) const {
  return powmod(base, exp, q_);
}

std::uint64_t PrimeField::inverse(std::uint64_t a) const {
  if (a % q_ == 0) throw std::domain_error("zero has no inverse");
  return powmod(a, q_ - 2, q_);
}

SecretPolynomial::SecretPolynomial(PrimeField field, std::vector<std::uint64_t> coefficients)
    : field_(field), coeffs_(std::move(coefficients)) {
  if (coeffs_.empty()) throw ValidationError("polynomial needs at least the secret coefficient");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (!field_.contains(coeffs_[i])) throw ValidationError("coefficient outside the field");
    if (i > 0 && coeffs_[i] == 0) throw ValidationError("higher coefficients must be nonzero");
  }
}

std::uint64_t SecretPolynomial::evaluate(std::uint64_t x) const {
  std::uint64_t acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = field_.add(field_.mul(acc, x), *it);
  }
  return acc;
}

SecretPolynomial gen_polynomial(std::uint64_t secret, std::size_t t, const PrimeField& field,
                                Rng& rng) {
  if (t < 1) throw ValidationError("threshold must be at least 1");
  if (!field.contains(secret)) throw ValidationError("secret must be smaller than the modulus");
  std::vector<std::uint64_t> coeffs{secret};
  std::uniform_int_distribution<std::uint64_t> nonzero(1, field.modulus() - 1);
  for (std::size_t i = 1; i < t; ++i) coeffs.push_back(nonzero(rng));
  return SecretPolynomial(field, std::move(coeffs));
}

std::vector<Share> eval_shares(const SecretPolynomial& poly,
                               std::span<const std::uint64_t> points) {
  std::vector<Share> shares;
  shares.reserve(points.size());
  for (std::uint64_t x : points) shares.push_back({x, 0});
  check_points(shares, poly.field());
  for (Share& s : shares) s.value = poly.evaluate(s.point);
  return shares;
}

std::uint64_t reconstruct(std::span<const Share> shares, std::size_t t, const PrimeField& field) {
  if (t == 0) throw ValidationError("threshold must be at least 1");
  if (shares.size() < t) {
    throw ValidationError("need " + std::to_string(t) + " shares, got " +
                          std::to_string(shares.size()));
  }
  const auto used = shares.first(t);
  check_points(used, field);
  std::uint64_t secret = 0;
  for (std::size_t r = 0; r < t; ++r) {
    std::uint64_t num = 1;
    std::uint64_t den = 1;
    for (std::size_t j = 0; j < t; ++j) {
      if (j == r) continue;
      num = field.mul(num, used[j].point);
      den = field.mul(den, field.sub(used[j].point, used[r].point));
    }
    if (den == 0) throw std::logic_error("distinct points gave a zero Lagrange denominator");
    const std::uint64_t basis = field.mul(num, field.inverse(den));
    secret = field.add(secret, field.mul(used[r].value, basis));
  }
  return secret;
}

}  // namespace dqa
