/*
 * Copyright 2026 The Proprio Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "proprio/pipeline.hpp"

namespace {

using proprio::Config;

// One slot per convenience flag; set() only fires for flags the user gave,
// so config-file values survive untouched otherwise.
struct Common {
  std::string config_path;
  std::string out_dir = "out";
  std::string dataset;
  std::string seed;
  std::string samples;
  std::string epochs;
  std::string trials;
  std::string seeds;
  std::string shuffles;
  std::string permutations;
  std::string magnify;
  std::string criterion;
  std::string stages;
  bool drift = false;
};

void add_common(CLI::App* sub, Common& args) {
  sub->allow_extras();
  sub->add_option("--config", args.config_path,
                  "key = value config file; see README for the key table");
  sub->add_option("--out", args.out_dir, "output directory")
      ->capture_default_str();
  sub->add_option("--seed", args.seed, "master seed (seed.master)");
}

// Remaining tokens are generic config overrides: `--section.key value` or
// `--section.key=value`, applied after the config file and alias flags.
void apply_extras(CLI::App* sub, Config& config) {
  const std::vector<std::string> extras = sub->remaining();
  std::size_t i = 0;
  while (i < extras.size()) {
    std::string token = extras[i];
    if (token.rfind("--", 0) != 0 || token.find('.') == std::string::npos) {
      throw proprio::ConfigError(
          "unrecognized argument '" + token +
          "' (config overrides look like --section.key value)");
    }
    token.erase(0, 2);
    const std::size_t eq = token.find('=');
    if (eq != std::string::npos) {
      config.set(token.substr(0, eq), token.substr(eq + 1));
      ++i;
    } else {
      if (i + 1 >= extras.size()) {
        throw proprio::ConfigError("missing value for override --" + token);
      }
      config.set(token, extras[i + 1]);
      i += 2;
    }
  }
}

Config make_config(CLI::App* sub, const Common& args,
                   const std::vector<std::pair<std::string, std::string>>&
                       aliases) {
  Config config;
  if (!args.config_path.empty()) {
    config.load_file(args.config_path);
  }
  if (sub->count("--seed")) config.set("seed.master", args.seed);
  for (const auto& [flag, key] : aliases) {
    if (sub->count(flag)) {
      if (flag == "--drift") {
        config.set(key, "true");
      } else if (key == "sim.samples") {
        config.set(key, args.samples);
      } else if (key == "train.epochs") {
        config.set(key, args.epochs);
      } else if (key == "ablate.trials" || key == "attr.trials") {
        config.set(key, args.trials);
      } else if (key == "ablate.seeds") {
        config.set(key, args.seeds);
      } else if (key == "ablate.shuffles") {
        config.set(key, args.shuffles);
      } else if (key == "attr.permutations") {
        config.set(key, args.permutations);
      } else if (key == "ablate.magnify_errorbars") {
        config.set(key, args.magnify);
      } else if (key == "attr.criterion") {
        config.set(key, args.criterion);
      }
    }
  }
  apply_extras(sub, config);
  return config;
}

std::vector<std::string> split_csv_list(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string part =
        text.substr(start, comma == std::string::npos ? std::string::npos
                                                      : comma - start);
    if (!part.empty()) parts.push_back(part);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return parts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "proprio: joint-capsule strain simulation, pose regression, and "
      "attribution toolkit"};
  app.require_subcommand(1);

  Common sim_args, train_args, ablate_args, attr_args, repro_args;

  CLI::App* sim = app.add_subcommand("simulate", "generate a dataset CSV");
  add_common(sim, sim_args);
  sim->add_option("--samples", sim_args.samples,
                  "trajectory length (sim.samples)");
  sim->add_flag("--drift", sim_args.drift,
                "enable encoder drift (sim.drift)");

  CLI::App* tr = app.add_subcommand("train", "train the pose estimator");
  add_common(tr, train_args);
  tr->add_option("dataset", train_args.dataset, "dataset CSV")->required();
  tr->add_option("--epochs", train_args.epochs, "training epochs");

  CLI::App* ab = app.add_subcommand("ablate", "redundancy ablation trials");
  add_common(ab, ablate_args);
  ab->add_option("dataset", ablate_args.dataset, "dataset CSV")->required();
  ab->add_option("--trials", ablate_args.trials, "trial count");
  ab->add_option("--seeds", ablate_args.seeds,
                 "comma-separated trial seeds (overrides --trials)");
  ab->add_option("--shuffles", ablate_args.shuffles,
                 "permutation-importance shuffles per feature");
  ab->add_option("--magnify", ablate_args.magnify,
                 "error-bar display magnification for the SVG");

  CLI::App* at =
      app.add_subcommand("attribute", "near-limit Shapley attribution");
  add_common(at, attr_args);
  at->add_option("dataset", attr_args.dataset, "dataset CSV")->required();
  at->add_option("--criterion", attr_args.criterion,
                 "near-limit subset: twist, bend, or pushpull");
  at->add_option("--trials", attr_args.trials, "trial count");
  at->add_option("--permutations", attr_args.permutations,
                 "Monte-Carlo permutations per evaluation row");

  CLI::App* rp =
      app.add_subcommand("repro", "full pipeline with summary vs reference");
  add_common(rp, repro_args);
  rp->add_option("--stages", repro_args.stages,
                 "comma-separated subset of simulate,train,ablate,attribute");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (sim->parsed()) {
      Config config = make_config(sim, sim_args,
                                  {{"--samples", "sim.samples"},
                                   {"--drift", "sim.drift"}});
      proprio::run_simulate(config, sim_args.out_dir);
    } else if (tr->parsed()) {
      Config config =
          make_config(tr, train_args, {{"--epochs", "train.epochs"}});
      proprio::run_train(config, train_args.dataset, train_args.out_dir);
    } else if (ab->parsed()) {
      Config config = make_config(
          ab, ablate_args,
          {{"--trials", "ablate.trials"},
           {"--seeds", "ablate.seeds"},
           {"--shuffles", "ablate.shuffles"},
           {"--magnify", "ablate.magnify_errorbars"}});
      proprio::run_ablate(config, ablate_args.dataset, ablate_args.out_dir);
    } else if (at->parsed()) {
      Config config = make_config(at, attr_args,
                                  {{"--criterion", "attr.criterion"},
                                   {"--trials", "attr.trials"},
                                   {"--permutations", "attr.permutations"}});
      proprio::run_attribute(config, attr_args.dataset, attr_args.out_dir,
                             proprio::criterion_from(
                                 config.get_string("attr.criterion")));
    } else if (rp->parsed()) {
      Config config = make_config(rp, repro_args, {});
      proprio::run_repro(config, repro_args.out_dir,
                         split_csv_list(repro_args.stages));
    }
  } catch (const proprio::InvariantError& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return 3;
  } catch (const proprio::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
