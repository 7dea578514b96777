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


// dqa <mode> --config <path> [--out <path>] [--format json|csv] [--seed N]
//
// Exit codes: 0 success, 1 failed lemma check or I/O error, 2 invalid
// spec, 3 register too large.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "dqa/errors.hpp"
#include "dqa/experiment.hpp"

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitCapacity = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed QFT adder simulator"};
  std::string mode;
  std::string config;
  std::string out = "-";
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  app.add_option("mode", mode, "exact | sample | analytic | compare | ntpa | lemmas")
      ->required()
      ->check(CLI::IsMember({"exact", "sample", "analytic", "compare", "ntpa", "lemmas"}));
  app.add_option("--config", config, "experiment spec (JSON)")->required();
  app.add_option("--out", out, "output path, - for stdout");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", seed, "overrides the spec's seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    dqa::ExperimentSpec spec = dqa::load_spec(config);
    spec.mode = dqa::parse_mode(mode);
    if (seed) spec.seed = *seed;
    const auto result = dqa::run_experiment(spec);
    dqa::write_output(result, dqa::parse_format(format), out);
    if (!result.passed) {
      std::cerr << "dqa: lemma check failed\n";
      return kExitFailed;
    }
    return 0;
  } catch (const dqa::CapacityError& e) {
    std::cerr << "dqa: capacity: " << e.what() << '\n';
    return kExitCapacity;
  } catch (const std::invalid_argument& e) {
    std::cerr << "dqa: invalid: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "dqa: " << e.what() << '\n';
    return kExitFailed;
  }
}
