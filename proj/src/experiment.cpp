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

#include "troploc/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

namespace troploc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ConfigError(key + ": " + what);
}

void expectObject(const json& value, const std::string& path) {
  if (!value.is_object()) {
    fail(path, "expected an object");
  }
}

void rejectUnknownKeys(const json& obj, const std::string& path,
                       std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      fail(path.empty() ? item.key() : path + "." + item.key(),
           "unknown key");
    }
  }
}

std::string join(const std::string& path, const char* key) {
  return path.empty() ? key : path + "." + key;
}

double getDouble(const json& obj, const std::string& path, const char* key,
                 std::optional<double> fallback) {
  if (!obj.contains(key)) {
    if (fallback) {
      return *fallback;
    }
    fail(join(path, key), "required field is missing");
  }
  const json& value = obj.at(key);
  if (!value.is_number()) {
    fail(join(path, key), "expected a number");
  }
  return value.get<double>();
}

std::int64_t getInt(const json& obj, const std::string& path, const char* key,
                    std::optional<std::int64_t> fallback) {
  if (!obj.contains(key)) {
    if (fallback) {
      return *fallback;
    }
    fail(join(path, key), "required field is missing");
  }
  const json& value = obj.at(key);
  if (!value.is_number_integer()) {
    fail(join(path, key), "expected an integer");
  }
  return value.get<std::int64_t>();
}

std::uint64_t getUint(const json& obj, const std::string& path,
                      const char* key, std::optional<std::uint64_t> fallback) {
  if (!obj.contains(key)) {
    if (fallback) {
      return *fallback;
    }
    fail(join(path, key), "required field is missing");
  }
  const json& value = obj.at(key);
  if (!value.is_number_integer() || (value.is_number_integer() &&
                                     !value.is_number_unsigned() &&
                                     value.get<std::int64_t>() < 0)) {
    fail(join(path, key), "expected a non-negative integer");
  }
  return value.get<std::uint64_t>();
}

bool getBool(const json& obj, const std::string& path, const char* key,
             bool fallback) {
  if (!obj.contains(key)) {
    return fallback;
  }
  const json& value = obj.at(key);
  if (!value.is_boolean()) {
    fail(join(path, key), "expected a boolean");
  }
  return value.get<bool>();
}

std::string getString(const json& obj, const std::string& path,
                      const char* key, std::optional<std::string> fallback) {
  if (!obj.contains(key)) {
    if (fallback) {
      return *fallback;
    }
    fail(join(path, key), "required field is missing");
  }
  const json& value = obj.at(key);
  if (!value.is_string()) {
    fail(join(path, key), "expected a string");
  }
  return value.get<std::string>();
}

// benign_rate (scalar, broadcast) or benign_rates (one per user).
Eigen::VectorXd parseRateVector(const json& obj, const std::string& path,
                                Eigen::Index n,
                                const std::optional<Eigen::VectorXd>& fallback) {
  const bool hasScalar = obj.contains("benign_rate");
  const bool hasVector = obj.contains("benign_rates");
  if (hasScalar && hasVector) {
    fail(join(path, "benign_rate"),
         "give either benign_rate or benign_rates, not both");
  }
  if (!hasScalar && !hasVector) {
    if (fallback) {
      return *fallback;
    }
    fail(join(path, "benign_rate"),
         "either benign_rate or benign_rates is required");
  }
  Eigen::VectorXd rates(n);
  if (hasScalar) {
    const double rate = getDouble(obj, path, "benign_rate", std::nullopt);
    if (!(rate > 0.0) || !std::isfinite(rate)) {
      fail(join(path, "benign_rate"), "must be positive and finite");
    }
    rates.setConstant(rate);
    return rates;
  }
  const json& list = obj.at("benign_rates");
  if (!list.is_array() || static_cast<Eigen::Index>(list.size()) != n) {
    fail(join(path, "benign_rates"),
         "expected an array with one rate per user");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const json& value = list.at(static_cast<std::size_t>(j));
    if (!value.is_number() || !(value.get<double>() > 0.0) ||
        !std::isfinite(value.get<double>())) {
      fail(join(path, "benign_rates"),
           "entry " + std::to_string(j) + " must be positive and finite");
    }
    rates[j] = value.get<double>();
  }
  return rates;
}

template <typename T, typename ParseValue>
StepSchedule<T> parseSchedule(const json& list, const std::string& path,
                              ParseValue parseValue) {
  if (!list.is_array() || list.empty()) {
    fail(path, "expected a non-empty array of {start, value} segments");
  }
  StepSchedule<T> schedule;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string itemPath = path + "[" + std::to_string(i) + "]";
    const json& item = list.at(i);
    expectObject(item, itemPath);
    rejectUnknownKeys(item, itemPath, {"start", "value"});
    const std::int64_t start = getInt(item, itemPath, "start", std::nullopt);
    if (start < 0) {
      fail(itemPath + ".start", "must be non-negative");
    }
    schedule.segments.push_back(
        {static_cast<Eigen::Index>(start), parseValue(item, itemPath)});
  }
  try {
    schedule.validate();
  } catch (const std::invalid_argument& error) {
    fail(path, error.what());
  }
  return schedule;
}

StepSchedule<double> parseAttackerRates(const json& attacker,
                                        const std::string& path,
                                        Eigen::Index changePeriod) {
  const int forms = attacker.contains("rate") + attacker.contains("rates") +
                    attacker.contains("rate_schedule");
  if (forms != 1) {
    fail(join(path, "rate"),
         "exactly one of rate, rates, rate_schedule is required");
  }
  auto checkRate = [](double rate, const std::string& key) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
      fail(key, "must be positive and finite");
    }
    return rate;
  };
  if (attacker.contains("rate")) {
    return StepSchedule<double>::constant(checkRate(
        getDouble(attacker, path, "rate", std::nullopt), join(path, "rate")));
  }
  if (attacker.contains("rates")) {
    const json& list = attacker.at("rates");
    if (!list.is_array() || list.empty()) {
      fail(join(path, "rates"), "expected a non-empty array of rates");
    }
    StepSchedule<double> schedule;
    for (std::size_t k = 0; k < list.size(); ++k) {
      const json& value = list.at(k);
      const std::string key =
          join(path, "rates") + "[" + std::to_string(k) + "]";
      if (!value.is_number()) {
        fail(key, "expected a number");
      }
      schedule.segments.push_back(
          {static_cast<Eigen::Index>(k) * changePeriod,
           checkRate(value.get<double>(), key)});
    }
    return schedule;
  }
  return parseSchedule<double>(
      attacker.at("rate_schedule"), join(path, "rate_schedule"),
      [&checkRate](const json& item, const std::string& itemPath) {
        return checkRate(getDouble(item, itemPath, "value", std::nullopt),
                         itemPath + ".value");
      });
}

StepSchedule<Eigen::Index> parseAttackerPositions(const json& attacker,
                                                  const std::string& path,
                                                  Eigen::Index n) {
  if (attacker.contains("position") && attacker.contains("position_schedule")) {
    fail(join(path, "position"),
         "give either position or position_schedule, not both");
  }
  auto checkPosition = [n](std::int64_t position, const std::string& key) {
    if (position < 0 || position >= n) {
      fail(key, "must name a user in [0, " + std::to_string(n) + ")");
    }
    return static_cast<Eigen::Index>(position);
  };
  if (attacker.contains("position_schedule")) {
    return parseSchedule<Eigen::Index>(
        attacker.at("position_schedule"), join(path, "position_schedule"),
        [&checkPosition](const json& item, const std::string& itemPath) {
          return checkPosition(getInt(item, itemPath, "value", std::nullopt),
                               itemPath + ".value");
        });
  }
  return StepSchedule<Eigen::Index>::constant(
      checkPosition(getInt(attacker, path, "position", std::int64_t{0}),
                    join(path, "position")));
}

std::string formatDouble(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::vector<std::string> splitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

constexpr const char* kTraceHeader =
    "t,theta,epsilon,nu,survivors,decoded_state,true_state,adapted,direction";

int directionCode(AdaptDirection direction) {
  switch (direction) {
    case AdaptDirection::up:
      return 1;
    case AdaptDirection::down:
      return -1;
    case AdaptDirection::none:
      break;
  }
  return 0;
}

TraceStats traceStats(const std::vector<TraceFileRow>& rows) {
  TraceStats stats;
  if (rows.empty()) {
    return stats;
  }
  stats.thetaMin = rows.front().theta;
  stats.thetaMax = rows.front().theta;
  double thetaSum = 0.0;
  double survivorSum = 0.0;
  for (const TraceFileRow& row : rows) {
    stats.thetaMin = std::min(stats.thetaMin, row.theta);
    stats.thetaMax = std::max(stats.thetaMax, row.theta);
    thetaSum += row.theta;
    survivorSum += static_cast<double>(row.survivors);
  }
  stats.thetaMean = thetaSum / static_cast<double>(rows.size());
  stats.meanSurvivors = survivorSum / static_cast<double>(rows.size());
  return stats;
}

}  // namespace

BaselineMode parseBaselineMode(const std::string& name) {
  if (name == "adaptive") {
    return BaselineMode::adaptive;
  }
  if (name == "fixed") {
    return BaselineMode::fixedTheta;
  }
  if (name == "noprune") {
    return BaselineMode::noPrune;
  }
  throw ConfigError("mode: expected adaptive, fixed, or noprune, got \"" +
                    name + "\"");
}

std::string baselineModeName(BaselineMode mode) {
  switch (mode) {
    case BaselineMode::adaptive:
      return "adaptive";
    case BaselineMode::fixedTheta:
      return "fixed";
    case BaselineMode::noPrune:
      return "noprune";
  }
  throw std::logic_error("unreachable baseline mode");
}

void RunConfig::validate() const {
  try {
    scenario.validate();
    localiser.validate(scenario.userCount);
    controller.validate();
  } catch (const std::invalid_argument& error) {
    throw ConfigError(error.what());
  }
  if (outputDir.empty()) {
    throw ConfigError("output_dir: must not be empty");
  }
}

RunConfig parseConfig(const fs::path& path) {
  std::ifstream input(path);
  if (!input) {
    throw ConfigError("config file not readable: " + path.string());
  }
  json doc;
  try {
    doc = json::parse(input);
  } catch (const json::parse_error& error) {
    throw ConfigError("config is not valid JSON: " +
                      std::string(error.what()));
  }
  return parseConfigJson(doc);
}

RunConfig parseConfigJson(const json& doc) {
  expectObject(doc, "config");
  rejectUnknownKeys(doc, "", {"version", "scenario", "localiser", "controller",
                              "output_dir", "emit_traffic", "mode",
                              "traffic_file"});
  if (doc.contains("version") &&
      getInt(doc, "", "version", std::nullopt) != 1) {
    fail("version", "unsupported config version (expected 1)");
  }

  RunConfig config;

  if (!doc.contains("scenario")) {
    fail("scenario", "required field is missing");
  }
  const json& scenario = doc.at("scenario");
  expectObject(scenario, "scenario");
  rejectUnknownKeys(scenario, "scenario",
                    {"users", "frames", "benign_rate", "benign_rates",
                     "attacker", "change_period", "seed"});
  const std::int64_t users = getInt(scenario, "scenario", "users",
                                    std::nullopt);
  if (users < 1) {
    fail("scenario.users", "must be at least 1");
  }
  const std::int64_t frames = getInt(scenario, "scenario", "frames",
                                     std::nullopt);
  if (frames < 1) {
    fail("scenario.frames", "must be at least 1");
  }
  config.scenario.userCount = static_cast<Eigen::Index>(users);
  config.scenario.frameCount = static_cast<Eigen::Index>(frames);
  config.scenario.benignRates = parseRateVector(
      scenario, "scenario", config.scenario.userCount, std::nullopt);
  const std::int64_t changePeriod =
      getInt(scenario, "scenario", "change_period", std::int64_t{1000});
  if (changePeriod < 1) {
    fail("scenario.change_period", "must be at least 1");
  }
  config.scenario.changePeriod = static_cast<Eigen::Index>(changePeriod);
  config.scenario.seed = getUint(scenario, "scenario", "seed",
                                 std::uint64_t{0});

  if (!scenario.contains("attacker")) {
    fail("scenario.attacker", "required field is missing");
  }
  const json& attacker = scenario.at("attacker");
  expectObject(attacker, "scenario.attacker");
  rejectUnknownKeys(attacker, "scenario.attacker",
                    {"rate", "rates", "rate_schedule", "position",
                     "position_schedule"});
  config.scenario.attackerRates = parseAttackerRates(
      attacker, "scenario.attacker", config.scenario.changePeriod);
  config.scenario.attackerPositions = parseAttackerPositions(
      attacker, "scenario.attacker", config.scenario.userCount);

  const json localiserDefaults = json::object();
  const json& localiser =
      doc.contains("localiser") ? doc.at("localiser") : localiserDefaults;
  expectObject(localiser, "localiser");
  rejectUnknownKeys(localiser, "localiser",
                    {"stay_probability", "attacker_rate", "benign_rate",
                     "benign_rates"});
  config.localiser.stayProbability =
      getDouble(localiser, "localiser", "stay_probability", 0.99);
  if (!(config.localiser.stayProbability > 0.0) ||
      config.localiser.stayProbability > 1.0) {
    fail("localiser.stay_probability", "must lie in (0, 1]");
  }
  config.localiser.attackerRate =
      getDouble(localiser, "localiser", "attacker_rate",
                config.scenario.attackerRates.segments.front().value);
  if (!(config.localiser.attackerRate > 0.0) ||
      !std::isfinite(config.localiser.attackerRate)) {
    fail("localiser.attacker_rate", "must be positive and finite");
  }
  config.localiser.benignRates = parseRateVector(
      localiser, "localiser", config.scenario.userCount,
      std::optional<Eigen::VectorXd>(config.scenario.benignRates));

  const json controllerDefaults = json::object();
  const json& controller =
      doc.contains("controller") ? doc.at("controller") : controllerDefaults;
  expectObject(controller, "controller");
  rejectUnknownKeys(controller, "controller",
                    {"alpha", "beta", "tau", "theta0", "theta_min",
                     "theta_max", "entropy_mode"});
  config.controller.alpha = getDouble(controller, "controller", "alpha", 0.25);
  if (std::isnan(config.controller.alpha) || config.controller.alpha < 0.0) {
    fail("controller.alpha", "must be non-negative");
  }
  config.controller.beta = getDouble(controller, "controller", "beta", 0.0005);
  if (!(config.controller.beta >= 0.0 && config.controller.beta < 1.0)) {
    fail("controller.beta", "must lie in [0, 1)");
  }
  const std::int64_t tau = getInt(controller, "controller", "tau",
                                  std::int64_t{50});
  if (tau < 1) {
    fail("controller.tau", "must be at least 1");
  }
  config.controller.tau = static_cast<std::size_t>(tau);
  config.controller.thetaMin =
      getDouble(controller, "controller", "theta_min", 1.01);
  if (!(config.controller.thetaMin > 1.0)) {
    fail("controller.theta_min", "must exceed 1");
  }
  config.controller.thetaMax =
      getDouble(controller, "controller", "theta_max", 1e6);
  if (!(config.controller.thetaMax >= config.controller.thetaMin)) {
    fail("controller.theta_max", "must be at least controller.theta_min");
  }
  config.controller.theta0 = getDouble(controller, "controller", "theta0",
                                       2.5);
  if (!(config.controller.theta0 >= config.controller.thetaMin &&
        config.controller.theta0 <= config.controller.thetaMax)) {
    fail("controller.theta0",
         "must lie in [controller.theta_min, controller.theta_max]");
  }
  const std::string entropyMode = getString(
      controller, "controller", "entropy_mode", std::string("literal"));
  if (entropyMode == "literal") {
    config.controller.entropyMode = EntropyMode::literal;
  } else if (entropyMode == "shifted") {
    config.controller.entropyMode = EntropyMode::shifted;
  } else {
    fail("controller.entropy_mode", "expected literal or shifted");
  }

  config.outputDir =
      getString(doc, "", "output_dir", std::string("out"));
  config.emitTraffic = getBool(doc, "", "emit_traffic", false);
  config.mode = parseBaselineMode(getString(doc, "", "mode",
                                            std::string("adaptive")));
  if (doc.contains("traffic_file")) {
    config.trafficFile = getString(doc, "", "traffic_file", std::nullopt);
  }

  config.validate();
  return config;
}

ControllerParams effectiveControllerParams(const ControllerParams& base,
                                           BaselineMode mode) {
  ControllerParams params = base;
  switch (mode) {
    case BaselineMode::adaptive:
      break;
    case BaselineMode::fixedTheta:
      // tau beyond any frame index keeps the adaptation rule from ever
      // being evaluated; theta stays at theta0.
      params.tau = std::numeric_limits<std::size_t>::max();
      break;
    case BaselineMode::noPrune:
      params.tau = std::numeric_limits<std::size_t>::max();
      // Far above any cost spread a desk-scale run can accumulate, so the
      // support is always the full state set.
      params.thetaMax = 1e18;
      params.theta0 = 1e18;
      break;
  }
  return params;
}

void writeTrace(const fs::path& path, const LocalisationResult& result) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write trace file: " + path.string());
  }
  out << kTraceHeader << "\n";
  for (std::size_t i = 0; i < result.trace.rows.size(); ++i) {
    const TraceRow& row = result.trace.rows[i];
    out << row.t << ',' << formatDouble(row.theta) << ','
        << formatDouble(row.epsilon) << ',' << formatDouble(row.nu) << ','
        << row.supportSize << ',' << result.decodedPositions[i] << ','
        << result.truePositions[i] << ',' << (row.adapted ? 1 : 0) << ','
        << directionCode(row.direction) << "\n";
  }
  if (!out) {
    throw std::runtime_error("failed while writing trace file: " +
                             path.string());
  }
}

std::vector<TraceFileRow> readTrace(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("trace file not readable: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw ConfigError("trace file has an unexpected header: " +
                      path.string());
  }
  std::vector<TraceFileRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    const std::vector<std::string> fields = splitCsvLine(line);
    if (fields.size() != 9) {
      throw ConfigError("trace row " + std::to_string(rows.size()) +
                        " has " + std::to_string(fields.size()) +
                        " fields, expected 9: " + path.string());
    }
    try {
      TraceFileRow row;
      row.t = static_cast<Eigen::Index>(std::stoll(fields[0]));
      row.theta = std::stod(fields[1]);
      row.epsilon = std::stod(fields[2]);
      row.nu = std::stod(fields[3]);
      row.survivors = static_cast<Eigen::Index>(std::stoll(fields[4]));
      row.decodedState = static_cast<Eigen::Index>(std::stoll(fields[5]));
      row.trueState = static_cast<Eigen::Index>(std::stoll(fields[6]));
      row.adapted = std::stoll(fields[7]) != 0;
      row.direction = static_cast<int>(std::stoll(fields[8]));
      rows.push_back(row);
    } catch (const std::exception&) {
      throw ConfigError("trace row " + std::to_string(rows.size()) +
                        " is not parseable: " + path.string());
    }
  }
  return rows;
}

void writeTraffic(const fs::path& path,
                  std::span<const RequestFrame> traffic) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write traffic file: " + path.string());
  }
  const Eigen::Index n = traffic.empty() ? 0 : traffic.front().counts.size();
  out << 't';
  for (Eigen::Index j = 0; j < n; ++j) {
    out << ",user_" << j;
  }
  out << "\n";
  for (const RequestFrame& frame : traffic) {
    out << frame.t;
    for (Eigen::Index j = 0; j < frame.counts.size(); ++j) {
      out << ',' << frame.counts[j];
    }
    out << "\n";
  }
  if (!out) {
    throw std::runtime_error("failed while writing traffic file: " +
                             path.string());
  }
}

std::vector<RequestFrame> readTraffic(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("traffic file not readable: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError("traffic file is empty: " + path.string());
  }
  const std::vector<std::string> header = splitCsvLine(line);
  if (header.empty() || header[0] != "t") {
    throw ConfigError("traffic file has an unexpected header: " +
                      path.string());
  }
  const std::size_t userCount = header.size() - 1;
  std::vector<RequestFrame> frames;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    const std::vector<std::string> fields = splitCsvLine(line);
    if (fields.size() != header.size()) {
      throw ConfigError("traffic row " + std::to_string(frames.size()) +
                        " has " + std::to_string(fields.size()) +
                        " fields, expected " + std::to_string(header.size()) +
                        ": " + path.string());
    }
    RequestFrame frame;
    try {
      frame.t = static_cast<Eigen::Index>(std::stoll(fields[0]));
      frame.counts.resize(static_cast<Eigen::Index>(userCount));
      for (std::size_t j = 0; j < userCount; ++j) {
        frame.counts[static_cast<Eigen::Index>(j)] = std::stoll(fields[j + 1]);
        if (frame.counts[static_cast<Eigen::Index>(j)] < 0) {
          throw ConfigError("negative count");
        }
      }
    } catch (const ConfigError&) {
      throw ConfigError("traffic row " + std::to_string(frames.size()) +
                        " has a negative count: " + path.string());
    } catch (const std::exception&) {
      throw ConfigError("traffic row " + std::to_string(frames.size()) +
                        " is not parseable: " + path.string());
    }
    if (frame.t != static_cast<Eigen::Index>(frames.size())) {
      throw ConfigError("traffic rows must be consecutive from t=0: " +
                        path.string());
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

ExperimentOutput runExperiment(const RunConfig& config) {
  config.validate();
  const ControllerParams params =
      effectiveControllerParams(config.controller, config.mode);

  std::vector<RequestFrame> traffic;
  if (config.trafficFile) {
    traffic = readTraffic(*config.trafficFile);
    if (std::cmp_less(traffic.size(), config.scenario.frameCount)) {
      throw ConfigError("traffic_file: tape has " +
                        std::to_string(traffic.size()) +
                        " frames but the scenario needs " +
                        std::to_string(config.scenario.frameCount));
    }
    for (const RequestFrame& frame : traffic) {
      if (frame.counts.size() != config.scenario.userCount) {
        throw ConfigError("traffic_file: tape is for " +
                          std::to_string(frame.counts.size()) +
                          " users but the scenario has " +
                          std::to_string(config.scenario.userCount));
      }
    }
  } else {
    traffic = generate(config.scenario);
  }

  const auto start = std::chrono::steady_clock::now();
  ExperimentOutput output;
  output.result = localise(config.scenario, traffic, config.localiser, params);
  const auto stop = std::chrono::steady_clock::now();
  output.wallTimeSeconds =
      std::chrono::duration<double>(stop - start).count();

  fs::create_directories(config.outputDir);
  output.tracePath = config.outputDir / "trace.csv";
  writeTrace(output.tracePath, output.result);

  json summary;
  summary["frame_accuracy"] = output.result.frameAccuracy;
  summary["mean_support_size"] = output.result.meanSupportSize;
  summary["adaptations_up"] = output.result.trace.upCount;
  summary["adaptations_down"] = output.result.trace.downCount;
  summary["wall_time_seconds"] = output.wallTimeSeconds;
  summary["frames"] = config.scenario.frameCount;
  summary["users"] = config.scenario.userCount;
  summary["seed"] = config.scenario.seed;
  summary["mode"] = baselineModeName(config.mode);
  output.summaryPath = config.outputDir / "summary.json";
  std::ofstream summaryOut(output.summaryPath);
  if (!summaryOut) {
    throw std::runtime_error("cannot write summary file: " +
                             output.summaryPath.string());
  }
  summaryOut << summary.dump(2) << "\n";

  if (config.emitTraffic) {
    output.trafficPath = config.outputDir / "traffic.csv";
    writeTraffic(*output.trafficPath,
                 std::span<const RequestFrame>(
                     traffic.data(),
                     static_cast<std::size_t>(config.scenario.frameCount)));
  }
  return output;
}

CompareReport compareRuns(const fs::path& traceA, const fs::path& traceB) {
  const std::vector<TraceFileRow> a = readTrace(traceA);
  const std::vector<TraceFileRow> b = readTrace(traceB);
  if (a.size() != b.size()) {
    throw ConfigError("traces differ in length: " + std::to_string(a.size()) +
                      " vs " + std::to_string(b.size()));
  }
  if (a.empty()) {
    throw ConfigError("traces are empty");
  }
  CompareReport report;
  report.frames = static_cast<Eigen::Index>(a.size());
  std::size_t agreements = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].decodedState == b[i].decodedState) {
      ++agreements;
    }
  }
  report.pathAgreement =
      static_cast<double>(agreements) / static_cast<double>(a.size());
  report.a = traceStats(a);
  report.b = traceStats(b);
  return report;
}

std::vector<SweepEntry> runSweep(const RunConfig& config,
                                 const std::vector<std::uint64_t>& seeds,
                                 std::size_t threads) {
  config.validate();
  if (seeds.empty()) {
    throw ConfigError("sweep: at least one seed is required");
  }
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() !=
      seeds.size()) {
    throw ConfigError("sweep: seeds must be unique");
  }

  std::vector<SweepEntry> entries(seeds.size());
  std::atomic<std::size_t> cursor{0};
  std::mutex errorMutex;
  std::exception_ptr firstError;

  auto worker = [&]() {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= seeds.size()) {
        return;
      }
      try {
        RunConfig runConfig = config;
        runConfig.scenario.seed = seeds[i];
        runConfig.outputDir =
            config.outputDir / ("seed-" + std::to_string(seeds[i]));
        const ExperimentOutput output = runExperiment(runConfig);
        entries[i] = {seeds[i],
                      runConfig.outputDir,
                      output.result.frameAccuracy,
                      output.result.meanSupportSize,
                      output.result.trace.upCount,
                      output.result.trace.downCount};
      } catch (...) {
        const std::scoped_lock lock(errorMutex);
        if (!firstError) {
          firstError = std::current_exception();
        }
      }
    }
  };

  const std::size_t workerCount =
      std::max<std::size_t>(1, std::min(threads, seeds.size()));
  std::vector<std::thread> pool;
  pool.reserve(workerCount);
  for (std::size_t w = 0; w < workerCount; ++w) {
    pool.emplace_back(worker);
  }
  for (std::thread& thread : pool) {
    thread.join();
  }
  if (firstError) {
    std::rethrow_exception(firstError);
  }

  json aggregate = json::array();
  for (const SweepEntry& entry : entries) {
    aggregate.push_back({{"seed", entry.seed},
                         {"output_dir", entry.outputDir.string()},
                         {"frame_accuracy", entry.frameAccuracy},
                         {"mean_support_size", entry.meanSupportSize},
                         {"adaptations_up", entry.adaptationsUp},
                         {"adaptations_down", entry.adaptationsDown}});
  }
  const fs::path aggregatePath = config.outputDir / "sweep.json";
  std::ofstream aggregateOut(aggregatePath);
  if (!aggregateOut) {
    throw std::runtime_error("cannot write sweep file: " +
                             aggregatePath.string());
  }
  aggregateOut << aggregate.dump(2) << "\n";
  return entries;
}

}  // namespace troploc
