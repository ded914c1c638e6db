// qrf: experiment runner. Every config key is also a --key flag that overrides the file.
//
//   qrf fit2d --config exp.cfg --iterations 200
//   qrf convergence --trials 200 --output_dir study
//
// Exit codes: 0 success, 2 config error, 3 numeric divergence, 4 resource limit.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "qrf/app/tasks.hpp"
#include "qrf/errors.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kDiverged = 3;
constexpr int kResourceLimit = 4;

struct Subcommand {
  const char* name;
  const char* help;
};

constexpr Subcommand kSubcommands[] = {
    {"fit2d", "regress pixel coordinates to colours"},
    {"fit3d", "fit the toy scene from training views and render a held-out view"},
    {"render", "render a view from a checkpoint"},
    {"qcount", "quantum-count the mean of one energy table"},
    {"convergence", "quantum counting vs Monte Carlo error study"},
    {"ablate", "activation x encoder x circuit grid"},
    {"qrender", "quantum-integrated render of a 2x2 view of the toy scene"},
};

}  // namespace

int main(int argc, char** argv) {
  using namespace qrf;
  CLI::App cli{"Quantum radiance field experiments"};
  cli.require_subcommand(1);
  std::map<std::string, std::string> config_path;
  std::map<std::string, std::map<std::string, std::string>> overrides;
  std::map<std::string, std::string> layers;
  for (const auto& sc : kSubcommands) {
    auto* sub = cli.add_subcommand(sc.name, sc.help);
    sub->add_option("--config", config_path[sc.name], "key = value config file");
    for (const auto& key : app::config_keys()) {
      if (key.name == "task") continue;
      const std::string flag = key.name == "template" ? "--template,--circuit" : "--" + key.name;
      sub->add_option(flag, overrides[sc.name][key.name], key.help);
    }
    sub->add_option("--layers", layers[sc.name], "layers of both circuit stages");
  }
  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return cli.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.exit(e);
    return kConfigError;
  }

  try {
    const CLI::App* sub = cli.get_subcommands().front();
    const std::string task = sub->get_name();
    app::ExperimentConfig config;
    if (!config_path[task].empty()) {
      config = app::parse_config("task = " + task + "\n" + app::read_text(config_path[task]));
    }
    app::set_config_value(config, "task", task);
    if (sub->count("--layers") > 0) {
      app::set_config_value(config, "layers_position", layers[task]);
      app::set_config_value(config, "layers_color", layers[task]);
    }
    for (const auto& key : app::config_keys()) {
      if (key.name != "task" && sub->count("--" + key.name) > 0) {
        app::set_config_value(config, key.name, overrides[task][key.name]);
      }
    }
    std::cout << app::run_task(config).dump(1) << "\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const TrainingDiverged& e) {
    std::cerr << "diverged: " << e.what() << "\n";
    return kDiverged;
  } catch (const ResourceLimit& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kResourceLimit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
