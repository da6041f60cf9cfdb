// Scenario-driven command line for the flat-affine Hermitian-Einstein lab.
//
// Each subcommand loads a JSON scenario, forces the matching task, runs it,
// and writes report.json (plus trace.csv / checkpoint.bin for flows) to the
// output directory.

#include <chrono>
#include <iostream>

#include <CLI11.hpp>

#include "ahe/scenario.hpp"

namespace {

struct CommonArgs {
  std::string scenario;
  std::string out = "out";
  int grid = 0;
  std::uint64_t seed = 0;
  bool grid_set = false;
  bool seed_set = false;
  bool resume = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--scenario", args.scenario, "Scenario JSON file")->required();
  cmd->add_option("--out", args.out, "Output directory");
  cmd->add_option("--grid", args.grid, "Override grid resolution N")->each([&](const std::string&) {
    args.grid_set = true;
  });
  cmd->add_option("--seed", args.seed, "Override RNG seed")->each([&](const std::string&) {
    args.seed_set = true;
  });
  cmd->add_flag("--resume", args.resume, "Resume a flow from a matching checkpoint");
}

int run_task(const CommonArgs& args, std::optional<ahe::Task> forced_task) {
  auto t0 = std::chrono::steady_clock::now();
  ahe::Scenario s = ahe::load_scenario(
      args.scenario, args.grid_set ? std::optional<int>(args.grid) : std::nullopt,
      args.seed_set ? std::optional<std::uint64_t>(args.seed) : std::nullopt);
  if (forced_task) s.task = *forced_task;
  ahe::Json rep = ahe::run_scenario(s, args.out, args.resume);
  auto t1 = std::chrono::steady_clock::now();
  double secs = std::chrono::duration<double>(t1 - t0).count();
  std::cerr << "[ahe] " << ahe::to_string(s.task) << " finished in " << secs << " s, report at "
            << args.out << "/report.json\n";
  std::cout << rep.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"affinehe: stability and Hermitian-Einstein structures for flat bundles over "
               "special flat affine manifolds"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* desc;
    std::optional<ahe::Task> task;
  };
  const std::vector<Sub> subs = {
      {"check-manifold", "Validate manifold generators, relations, and the base metric",
       ahe::Task::CheckManifold},
      {"degree", "Degree and slope of the bundle", ahe::Task::Degree},
      {"classify", "Stability classification", ahe::Task::Classify},
      {"hn", "Harder-Narasimhan filtration", ahe::Task::HN},
      {"socle", "Socle and socle filtration", ahe::Task::Socle},
      {"he-solve", "Hermitian-Einstein heat flow", ahe::Task::HESolve},
      {"bogomolov", "Bogomolov-type inequality", ahe::Task::Bogomolov},
      {"oracle", "Brute-force oracle and main-path diff", ahe::Task::Oracle},
      {"run", "Run the task declared in the scenario file", std::nullopt},
  };

  std::vector<std::unique_ptr<CommonArgs>> arg_blocks;
  for (const auto& sub : subs) {
    auto* cmd = app.add_subcommand(sub.name, sub.desc);
    arg_blocks.push_back(std::make_unique<CommonArgs>());
    CommonArgs* args = arg_blocks.back().get();
    add_common(cmd, *args);
    ahe::Task forced{};
    bool has_forced = sub.task.has_value();
    if (has_forced) forced = *sub.task;
    cmd->callback([args, forced, has_forced]() {
      run_task(*args, has_forced ? std::optional<ahe::Task>(forced) : std::nullopt);
    });
  }

  // principal <sub>
  auto* principal = app.add_subcommand("principal", "Principal-bundle tasks");
  principal->require_subcommand(1);
  const std::vector<std::pair<const char*, ahe::Task>> psubs = {
      {"classify", ahe::Task::PrincipalClassify},
      {"hn", ahe::Task::PrincipalHN},
      {"socle", ahe::Task::PrincipalSocle},
      {"he", ahe::Task::PrincipalHE},
  };
  for (const auto& [name, task] : psubs) {
    auto* cmd = principal->add_subcommand(name, std::string("Principal ") + name);
    arg_blocks.push_back(std::make_unique<CommonArgs>());
    CommonArgs* args = arg_blocks.back().get();
    add_common(cmd, *args);
    ahe::Task forced = task;
    cmd->callback([args, forced]() { run_task(*args, forced); });
  }

  try {
    CLI11_PARSE(app, argc, argv);
  } catch (const ahe::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
