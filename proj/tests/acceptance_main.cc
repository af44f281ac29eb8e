// SPDX-License-Identifier: Apache-2.0
//
// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "cgoinv/acceptance.h"
#include "cgoinv/parallel.h"

int main(int argc, char** argv) {
  CLI::App app{"cgoinv acceptance suite"};
  cgoinv::acceptance::Options options;
  std::string json_path;
  bool quiet = false;
  app.add_option("--subset", options.subset, "criteria to run (default: all)")->delimiter(',');
  app.add_option("--tau-scale", options.tau_scale, "multiply the calibrated tau");
  app.add_option("--threads", options.threads, "worker threads (0: all cores)");
  app.add_option("--seed", options.seed, "random seed");
  app.add_option("--json", json_path, "write a JSON report here");
  app.add_flag("--quiet", quiet, "no progress output");
  CLI11_PARSE(app, argc, argv);
  if (options.threads > 0) cgoinv::SetDefaultThreads(options.threads);
  if (!quiet) options.progress = &std::cerr;

  const auto results = cgoinv::acceptance::Run(options);
  bool all = true;
  for (const auto& r : results) {
    std::cout << cgoinv::acceptance::FormatLine(r) << '\n';
    all = all && r.pass;
  }
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    cgoinv::acceptance::WriteJsonReport(out, results);
  }
  return all ? 0 : 1;
}
