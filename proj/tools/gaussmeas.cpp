// Copyright 2026 The gaussmeas Authors
//
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

// gaussmeas: batch front end over problem files.
//
//   gaussmeas run --input problem.json [--output report.json] [--seed N]
//   gaussmeas classify --input single.json          # {"entities": ..., "args": ...}
//
// Exit codes: 0 ok, 2 parse error, 3 validation error, 4 task failure.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "problem_runner.hpp"

namespace {

const char* kSubcommands[] = {"run",      "validate",         "classify",         "ic-single",
                              "ic-set",   "coverage",         "witness",          "dilate",
                              "channel-from-obs", "obs-from-channel", "pushforward", "sample",
                              "reconstruct", "decompose-covariant", "bosonic-probe", "oracle-check"};

}  // namespace

int main(int argc, char** argv) {
  using namespace gaussmeas;
  CLI::App app{"Gaussian measurement calculus: batch problem runner"};
  app.require_subcommand(1, 1);

  std::string input, output;
  cli::RunOptions opt;
  app.add_option("--input", input, "Problem file (JSON)")->required();
  app.add_option("--output", output, "Report file (default: stdout)");
  app.add_option("--seed", opt.seed, "64-bit seed for sampling tasks");
  app.add_option("--tol", opt.tol, "Tolerance for boundary-sensitive checks")->check(CLI::NonNegativeNumber);
  app.add_option("--cutoff", opt.cutoff, "Fock cutoff for oracle tasks")->check(CLI::Range(2, 400));
  app.add_flag("--timing", opt.timing, "Record per-task wall time (reports are then not reproducible)");
  app.fallthrough();

  for (const char* name : kSubcommands) {
    const std::string n = name;
    std::string help = n == "run" ? "Run every task of a problem file" : "Run '" + n + "' tasks";
    for (const auto& op : cli::dispatch_table()) {
      if (n != "run" && op.name == n) help += " (" + op.library_ops.front() + ")";
    }
    app.add_subcommand(n, help);
  }
  // Remaining table entries are reachable with `op <name>`.
  std::string op_name;
  auto* op_cmd = app.add_subcommand("op", "Run tasks of any dispatch-table op");
  op_cmd->add_option("name", op_name, "Op name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitParse;
  }

  std::string selected = app.get_subcommands().front()->get_name();
  if (selected == "op") {
    if (!cli::find_op(op_name)) {
      std::cerr << "unknown op '" << op_name << "'\n";
      return cli::kExitValidation;
    }
    selected = op_name;
  }

  std::ifstream in(input, std::ios::binary);
  cli::RunResult result;
  if (!in) {
    result.report = cli::base_report(opt);
    result.report["status"] = "parse-error";
    result.report["error"] = {{"kind", "io"}, {"message", "cannot read '" + input + "'"}};
    result.exit_code = cli::kExitParse;
  } else {
    std::stringstream buf;
    buf << in.rdbuf();
    result = cli::run_text(buf.str(), opt, selected == "run" ? "" : selected);
  }

  const std::string text = io::dump(result.report) + "\n";
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write '" << output << "'\n";
      return cli::kExitRuntime;
    }
    out << text;
  }
  if (result.exit_code != cli::kExitOk && result.report.contains("error")) {
    std::cerr << result.report["error"].value("message", std::string("error")) << "\n";
  }
  return result.exit_code;
}
