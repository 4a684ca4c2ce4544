// Copyright 2026 The cachebeam Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cachebeam/cachebeam.h"

namespace {

int exit_code(cb_status status) {
  switch (status) {
    case CB_OK: return 0;
    case CB_ERR_CONFIG: return 2;
    case CB_ERR_NONCONVERGENCE: return 3;
    default: return 1;
  }
}

int fail(cb_status status) {
  std::cerr << "cachebeam: " << cb_status_name(status) << ": " << cb_last_error() << "\n";
  return exit_code(status);
}

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<std::string> out;
  std::optional<std::string> format;
  bool print_config = false;
};

int run(const std::string& scenario, const Options& opt) {
  cb_experiment* raw = nullptr;
  cb_status st = opt.config.empty() ? cb_experiment_parse("{}", &raw)
                                    : cb_experiment_load(opt.config.c_str(), &raw);
  if (st != CB_OK) return fail(st);
  std::unique_ptr<cb_experiment, decltype(&cb_experiment_destroy)> exp(raw,
                                                                       cb_experiment_destroy);
  if ((st = cb_experiment_set_scenario(exp.get(), scenario.c_str())) != CB_OK) return fail(st);
  if (opt.seed && (st = cb_experiment_set_seed(exp.get(), *opt.seed)) != CB_OK) return fail(st);
  if (opt.trials && (st = cb_experiment_set_trials(exp.get(), *opt.trials)) != CB_OK) {
    return fail(st);
  }
  if (opt.out && (st = cb_experiment_set_output_dir(exp.get(), opt.out->c_str())) != CB_OK) {
    return fail(st);
  }
  if (opt.format && (st = cb_experiment_set_format(exp.get(), opt.format->c_str())) != CB_OK) {
    return fail(st);
  }
  if (opt.print_config) {
    std::cout << cb_experiment_config(exp.get());
    return 0;
  }
  std::size_t rows = 0;
  std::size_t failed = 0;
  if ((st = cb_experiment_run(exp.get(), &rows, &failed)) != CB_OK) return fail(st);
  std::cerr << "cachebeam: " << rows << " rows written";
  if (failed != 0) std::cerr << ", " << failed << " marked as failed";
  std::cerr << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coverage analysis, cache placement and simulation for cache-enabled "
               "multi-antenna small-cell networks"};
  app.set_version_flag("--version", std::string(cb_version()));
  app.require_subcommand(1);

  Options opt;
  std::string chosen;
  const struct {
    const char* name;
    const char* help;
  } scenarios[] = {
      {"coverage", "Analytic coverage probabilities with bound pairs"},
      {"optimize-prob", "Optimal probabilistic caching against most-popular caching"},
      {"optimize-coded", "Greedy and exhaustive coded placement"},
      {"simulate", "Monte Carlo estimates next to analytic values"},
      {"compare", "Most-popular, probabilistic and coded caching side by side"},
  };
  for (const auto& s : scenarios) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", opt.config, "JSON config or run manifest")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "Base random seed");
    sub->add_option("--trials", opt.trials, "Monte Carlo trials per sweep point");
    sub->add_option("--out", opt.out, "Output directory");
    sub->add_option("--format", opt.format, "Table format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--print-config", opt.print_config,
                  "Print the resolved config instead of running");
    sub->callback([&chosen, name = std::string(s.name)] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  return run(chosen, opt);
}
