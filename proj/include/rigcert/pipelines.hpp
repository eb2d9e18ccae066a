#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "rigcert/certify.hpp"
#include "rigcert/config.hpp"
#include "rigcert/error.hpp"

namespace rigcert {

struct RunResult {
  Json report;                               // report.json
  std::map<std::string, std::string> tables;  // CSV file name -> contents
  GateOutcome verdict = GateOutcome::Pass;
};

// Runs the scenario's pipeline. Module errors propagate with the scenario
// name prefixed to the message.
RunResult run_scenario(const Scenario& s);

// Report for a run that stopped on an error.
Json error_report(const Scenario& s, const Error& e);

// 0 on pass, 2 when the worst outcome is inapplicable, 1 otherwise.
int exit_code(GateOutcome verdict);

// Writes report.json and the tables into `dir`, creating it. Throws IoError.
void write_artifacts(const std::filesystem::path& dir, const Json& report,
                     const std::map<std::string, std::string>& tables = {});

}  // namespace rigcert
