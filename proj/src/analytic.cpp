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


#include "dqa/analytic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dqa/errors.hpp"

namespace dqa {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kMaxReportedFailures = 8;
constexpr std::size_t kMaxAnalyticBits = 24;

void check_width(std::size_t n) {
  if (n == 0) throw ValidationError("bit width must be at least 1");
  if (n > kMaxAnalyticBits) throw ValidationError("bit width too large for a dense distribution");
}

void check_a(double a) {
  if (!(a >= 0.0 && a <= 1.0)) throw ValidationError("fidelity parameter must lie in [0, 1]");
}

std::size_t width_of(std::span<const double> probs) {
  if (probs.size() < 2 || (probs.size() & (probs.size() - 1)) != 0) {
    throw ValidationError("error distribution length must be a power of two >= 2");
  }
  return static_cast<std::size_t>(std::countr_zero(probs.size()));
}

// Normalizes rounding drift so the values pass ProbabilityDistribution.
std::vector<double> normalized(std::vector<double> probs) {
  double total = 0.0;
  for (double& v : probs) {
    v = std::max(v, 0.0);
    total += v;
  }
  for (double& v : probs) v /= total;
  return probs;
}

class Recorder {
 public:
  Recorder(std::string name, double tol) : tol_(tol) { report_.name = std::move(name); }

  // Records the requirement lhs >= rhs (or lhs == rhs when `equal`).
  void require(double lhs, double rhs, bool equal, std::size_t zl, std::size_t zr) {
    ++report_.comparisons;
    const double gap = equal ? std::abs(lhs - rhs) : rhs - lhs;
    if (gap <= tol_) return;
    report_.passed = false;
    report_.worst_gap = std::max(report_.worst_gap, gap);
    if (report_.failures.size() < kMaxReportedFailures) {
      std::ostringstream os;
      os << "P(" << zl << ")=" << lhs << (equal ? " != " : " < ") << "P(" << zr << ")=" << rhs;
      report_.failures.push_back(os.str());
    }
  }

  LemmaReport take() { return std::move(report_); }

 private:
  double tol_;
  LemmaReport report_;
};

}  // namespace

void AnalyticParams::validate() const {
  if (inputs.empty()) throw ValidationError("at least one input is required");
  check_width(n);
  check_a(a);
}

OutcomeDistribution analytic_distribution(const AnalyticParams& params) {
  params.validate();
  const std::size_t n = params.n;
  const std::uint64_t dim = std::uint64_t{1} << n;
  const std::uint64_t total = correct_sum(params.inputs, n);
  std::vector<double> probs(dim);
  for (std::uint64_t x = 0; x < dim; ++x) {
    double prod = 1.0;
    for (std::size_t s = 0; s < n; ++s) {
      const std::uint64_t mod = std::uint64_t{1} << (n - s);
      // theta_s - 2 pi x / 2^{n-s}, with the integer part reduced first.
      const std::uint64_t diff = (total + mod - (x % mod)) % mod;
      prod *= 1.0 + params.a * std::cos(kTwoPi * static_cast<double>(diff) /
                                        static_cast<double>(mod));
    }
    probs[x] = prod / static_cast<double>(dim);
  }
  return {n, ProbabilityDistribution(normalized(std::move(probs)))};
}

std::vector<double> error_distribution(std::size_t n, double a) {
  check_width(n);
  check_a(a);
  const std::uint64_t dim = std::uint64_t{1} << n;
  std::vector<double> probs(dim);
  for (std::uint64_t z = 0; z < dim; ++z) {
    double prod = 1.0;
    for (std::size_t s = 1; s <= n; ++s) {
      const std::uint64_t mod = std::uint64_t{1} << s;
      prod *= 1.0 + a * std::cos(kTwoPi * static_cast<double>(z % mod) /
                                 static_cast<double>(mod));
    }
    probs[z] = prod / static_cast<double>(dim);
  }
  return probs;
}

std::vector<double> error_profile(const OutcomeDistribution& dist, std::uint64_t correct) {
  const std::size_t dim = dist.probs.size();
  std::vector<double> out(dim);
  for (std::size_t z = 0; z < dim; ++z) out[z] = dist.probs[(correct + z) % dim];
  return out;
}

double predicted_a(const NoiseModel& noise, std::size_t ghz_size, std::size_t rounds) {
  noise.validate();
  if (ghz_size < 2) throw ValidationError("GHZ resource needs at least 2 qubits");
  if (noise.kind == NoiseKind::none) return 1.0;
  return std::pow(1.0 - noise.p, static_cast<double>(rounds * ghz_size));
}

LemmaReport check_reflection_symmetry(std::span<const double> p, double tol) {
  width_of(p);
  const std::size_t dim = p.size();
  Recorder rec("reflection_symmetry", tol);
  for (std::size_t z = 1; z <= dim / 2; ++z) rec.require(p[z], p[dim - z], true, z, dim - z);
  return rec.take();
}

LemmaReport check_power_of_two_dominance(std::span<const double> p, double tol) {
  const std::size_t n = width_of(p);
  Recorder rec("power_of_two_dominance", tol);
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t pk = std::size_t{1} << k;
    for (std::size_t z = 1; z <= pk; ++z) rec.require(p[pk], p[z], false, pk, z);
  }
  return rec.take();
}

LemmaReport check_proximity_ordering(std::span<const double> p, double tol) {
  const std::size_t n = width_of(p);
  Recorder rec("proximity_ordering", tol);
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t pk = std::size_t{1} << k;
    for (std::size_t z = 1; z <= pk; ++z) {
      const std::size_t mirror = 2 * pk - z;
      rec.require(p[z], p[mirror], false, z, mirror);
    }
  }
  return rec.take();
}

LemmaReport check_reflection_symmetry(std::size_t n, double a) {
  return check_reflection_symmetry(error_distribution(n, a), kAnalyticLemmaTolerance);
}

LemmaReport check_power_of_two_dominance(std::size_t n, double a) {
  return check_power_of_two_dominance(error_distribution(n, a), kAnalyticLemmaTolerance);
}

LemmaReport check_proximity_ordering(std::size_t n, double a) {
  return check_proximity_ordering(error_distribution(n, a), kAnalyticLemmaTolerance);
}

std::vector<PolarPoint> polar_coordinates(const OutcomeDistribution& dist) {
  const std::size_t dim = dist.probs.size();
  std::vector<PolarPoint> out(dim);
  for (std::size_t x = 0; x < dim; ++x) {
    out[x] = {kTwoPi * static_cast<double>(x) / static_cast<double>(dim), dist.probs[x]};
  }
  return out;
}

}  // namespace dqa
