// troploc/experiment.hpp
//
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "troploc/localiser.hpp"

namespace troploc {

// Ill-formed or inconsistent run configuration; the message names the
// offending config key where one exists.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BaselineMode {
  adaptive,    // the full controller
  fixedTheta,  // prune at theta0 forever, adaptation disabled
  noPrune,     // effectively infinite theta, adaptation disabled
};

// "adaptive", "fixed", or "noprune"; anything else raises ConfigError.
BaselineMode parseBaselineMode(const std::string& name);
std::string baselineModeName(BaselineMode mode);

struct RunConfig {
  Scenario scenario;
  LocaliserConfig localiser;
  ControllerParams controller;
  std::filesystem::path outputDir = "out";
  bool emitTraffic = false;
  BaselineMode mode = BaselineMode::adaptive;
  // When set, traffic is replayed from this CSV instead of being generated.
  std::optional<std::filesystem::path> trafficFile;

  void validate() const;
};

// Loads and validates a JSON run config. The schema is documented in the
// README; unknown keys are rejected so typos cannot silently fall back to
// defaults.
RunConfig parseConfig(const std::filesystem::path& path);
RunConfig parseConfigJson(const nlohmann::json& doc);

// The controller parameters actually used for a mode: fixedTheta and
// noPrune disable the adaptation rule (and noPrune lifts theta beyond any
// reachable cost spread).
ControllerParams effectiveControllerParams(const ControllerParams& base,
                                           BaselineMode mode);

struct ExperimentOutput {
  LocalisationResult result;
  double wallTimeSeconds = 0.0;
  std::filesystem::path tracePath;
  std::filesystem::path summaryPath;
  std::optional<std::filesystem::path> trafficPath;
};

// Runs one experiment end to end: traffic, localisation, and the trace.csv
// plus summary.json sinks under config.outputDir.
ExperimentOutput runExperiment(const RunConfig& config);

// Frame-level series as written to / read from trace.csv.
struct TraceFileRow {
  Eigen::Index t = 0;
  double theta = 0.0;
  double epsilon = 0.0;
  double nu = 0.0;
  Eigen::Index survivors = 0;
  Eigen::Index decodedState = 0;
  Eigen::Index trueState = 0;
  bool adapted = false;
  int direction = 0;  // +1 loosened, -1 tightened, 0 untouched
};

void writeTrace(const std::filesystem::path& path,
                const LocalisationResult& result);
std::vector<TraceFileRow> readTrace(const std::filesystem::path& path);

void writeTraffic(const std::filesystem::path& path,
                  std::span<const RequestFrame> traffic);
std::vector<RequestFrame> readTraffic(const std::filesystem::path& path);

struct TraceStats {
  double meanSurvivors = 0.0;
  double thetaMin = 0.0;
  double thetaMax = 0.0;
  double thetaMean = 0.0;
};

struct CompareReport {
  Eigen::Index frames = 0;
  double pathAgreement = 0.0;  // fraction of frames with equal decoded_state
  TraceStats a;
  TraceStats b;
};

// Compares two trace.csv files frame by frame. Traces of different length
// raise ConfigError.
CompareReport compareRuns(const std::filesystem::path& traceA,
                          const std::filesystem::path& traceB);

struct SweepEntry {
  std::uint64_t seed = 0;
  std::filesystem::path outputDir;
  double frameAccuracy = 0.0;
  double meanSupportSize = 0.0;
  std::size_t adaptationsUp = 0;
  std::size_t adaptationsDown = 0;
};

// Runs the same config once per seed, each run in its own subdirectory of
// config.outputDir, fanned out over `threads` workers. Returns the entries
// in seed order and writes an aggregate sweep.json.
std::vector<SweepEntry> runSweep(const RunConfig& config,
                                 const std::vector<std::uint64_t>& seeds,
                                 std::size_t threads);

}  // namespace troploc
