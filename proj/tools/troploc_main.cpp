// Copyright 2026 The troploc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "troploc/experiment.hpp"

namespace {

using troploc::RunConfig;

// Exit codes: 0 success, 1 configuration/validation problem, 2 runtime
// failure inside an otherwise valid experiment.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct RunFlags {
  std::string configPath;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> outputDir;
  std::optional<std::string> mode;
  std::optional<std::string> trafficFile;
  bool emitTraffic = false;
};

RunConfig loadConfig(const RunFlags& flags) {
  RunConfig config = troploc::parseConfig(flags.configPath);
  if (flags.seed) {
    config.scenario.seed = *flags.seed;
  }
  if (flags.outputDir) {
    config.outputDir = *flags.outputDir;
  }
  if (flags.mode) {
    config.mode = troploc::parseBaselineMode(*flags.mode);
  }
  if (flags.trafficFile) {
    config.trafficFile = *flags.trafficFile;
  }
  if (flags.emitTraffic) {
    config.emitTraffic = true;
  }
  return config;
}

void addRunFlags(CLI::App* cmd, RunFlags& flags) {
  cmd->add_option("--config", flags.configPath, "JSON run configuration")
      ->required();
  cmd->add_option("--seed", flags.seed, "override the scenario seed");
  cmd->add_option("--output-dir", flags.outputDir,
                  "override the output directory");
  cmd->add_option("--mode", flags.mode,
                  "override the baseline mode: adaptive, fixed, or noprune");
  cmd->add_option("--traffic-file", flags.trafficFile,
                  "replay a traffic.csv tape instead of generating traffic");
  cmd->add_flag("--emit-traffic", flags.emitTraffic,
                "also write the traffic tape as traffic.csv");
}

int runCommand(const RunFlags& flags) {
  const RunConfig config = loadConfig(flags);
  const troploc::ExperimentOutput output = troploc::runExperiment(config);
  std::cout << "wrote " << output.tracePath.string() << "\n"
            << "wrote " << output.summaryPath.string() << "\n";
  if (output.trafficPath) {
    std::cout << "wrote " << output.trafficPath->string() << "\n";
  }
  std::cout << "frame_accuracy " << output.result.frameAccuracy << "\n"
            << "mean_support_size " << output.result.meanSupportSize << "\n"
            << "adaptations_up " << output.result.trace.upCount << "\n"
            << "adaptations_down " << output.result.trace.downCount << "\n";
  return kExitOk;
}

int compareCommand(const std::string& traceA, const std::string& traceB) {
  const troploc::CompareReport report = troploc::compareRuns(traceA, traceB);
  nlohmann::json out;
  out["frames"] = report.frames;
  out["path_agreement"] = report.pathAgreement;
  for (const auto& [key, stats] :
       {std::pair<const char*, const troploc::TraceStats&>{"a", report.a},
        {"b", report.b}}) {
    out[key] = {{"mean_survivors", stats.meanSurvivors},
                {"theta_min", stats.thetaMin},
                {"theta_max", stats.thetaMax},
                {"theta_mean", stats.thetaMean}};
  }
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int sweepCommand(const RunFlags& flags,
                 const std::vector<std::uint64_t>& seeds,
                 std::size_t threads) {
  const RunConfig config = loadConfig(flags);
  const std::vector<troploc::SweepEntry> entries =
      troploc::runSweep(config, seeds, threads);
  for (const troploc::SweepEntry& entry : entries) {
    std::cout << "seed " << entry.seed << " frame_accuracy "
              << entry.frameAccuracy << " mean_support_size "
              << entry.meanSupportSize << " adaptations "
              << entry.adaptationsUp << "/" << entry.adaptationsDown << "\n";
  }
  std::cout << "wrote " << (config.outputDir / "sweep.json").string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive min-plus Viterbi localisation experiments"};
  app.require_subcommand(1);

  RunFlags runFlags;
  CLI::App* run = app.add_subcommand("run", "run one experiment");
  addRunFlags(run, runFlags);

  std::string traceA;
  std::string traceB;
  CLI::App* compare =
      app.add_subcommand("compare", "compare two trace.csv files");
  compare->add_option("traceA", traceA, "first trace.csv")->required();
  compare->add_option("traceB", traceB, "second trace.csv")->required();

  RunFlags sweepFlags;
  std::vector<std::uint64_t> seeds;
  std::size_t threads = std::thread::hardware_concurrency();
  CLI::App* sweep =
      app.add_subcommand("sweep", "run one experiment per seed in parallel");
  addRunFlags(sweep, sweepFlags);
  sweep->add_option("--seeds", seeds, "comma-separated seed list")
      ->delimiter(',')
      ->required();
  sweep->add_option("--threads", threads, "worker thread count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) {
      return runCommand(runFlags);
    }
    if (compare->parsed()) {
      return compareCommand(traceA, traceB);
    }
    return sweepCommand(sweepFlags, seeds, threads);
  } catch (const troploc::ConfigError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& error) {
    std::cerr << "runtime error: " << error.what() << "\n";
    return kExitRuntime;
  }
}
