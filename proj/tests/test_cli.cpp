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


#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include "problem_runner.hpp"

namespace cli = gaussmeas::cli;
using json = nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string problem(const std::string& name) { return std::string(GAUSSMEAS_PROBLEMS_DIR) + "/" + name; }

cli::RunResult run(const std::string& text, const std::string& single_op = "") {
  return cli::run_text(text, cli::RunOptions{}, single_op);
}

// Runs the installed binary; returns its exit status.
int run_binary(const std::string& args, const std::string& out_path) {
  const std::string cmd = std::string(GAUSSMEAS_CLI_PATH) + " " + args + " > " + out_path + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("gaussmeas_test_" + name)).string();
}

}  // namespace

TEST(Runner, ClassifyQFunction) {
  const auto r = run(read_file(problem("classify_qfunction.json")));
  ASSERT_EQ(r.exit_code, cli::kExitOk);
  const json& out = r.report.at("tasks").at(0).at("outputs");
  EXPECT_FALSE(out.at("commutative").get<bool>());
  EXPECT_FALSE(out.at("sharp").get<bool>());
  EXPECT_TRUE(out.at("covariant").get<bool>());
  EXPECT_TRUE(out.at("ic").get<bool>());
}

TEST(Runner, IcSetOnTwoQuadratures) {
  const auto r = run(read_file(problem("ic_set_quadratures.json")));
  ASSERT_EQ(r.exit_code, cli::kExitOk);
  const json& out = r.report.at("tasks").at(0).at("outputs");
  EXPECT_FALSE(out.at("ic").get<bool>());
  ASSERT_TRUE(out.at("witness").is_object());
  EXPECT_LE(out.at("witness").at("max_statistics_difference").get<double>(), 1e-10);
}

TEST(Runner, EveryTaskInTheSampleFileSucceeds) {
  const auto r = run(read_file(problem("all_ops.json")));
  ASSERT_EQ(r.exit_code, cli::kExitOk) << r.report.dump();
  for (const auto& t : r.report.at("tasks")) {
    EXPECT_EQ(t.at("status"), "ok") << t.dump();
    EXPECT_TRUE(t.contains("inputs_digest"));
    EXPECT_FALSE(t.contains("timing_ms"));
  }
}

TEST(Runner, ErrorCodes) {
  EXPECT_EQ(run("{not json").exit_code, cli::kExitParse);
  EXPECT_EQ(run(R"({"version": "1", "tasks": [{"op": "classify", "args": {"observable": "nope"}}]})").exit_code,
            cli::kExitValidation);
  EXPECT_EQ(run(R"({"version": "7", "tasks": []})").exit_code, cli::kExitValidation);
  EXPECT_EQ(run(R"({"version": "1", "tasks": [{"op": "frobnicate"}]})").exit_code, cli::kExitValidation);
  EXPECT_EQ(run(R"({"version": "1", "entities": {"s": {"kind": "state", "m": [0], "v": [[1]]}}, "tasks": []})")
                .exit_code,
            cli::kExitValidation);
  // Uncertainty violation surfaces when the task runs.
  const auto bad = run(R"({"version": "1",
      "entities": {"s": {"kind": "state", "m": [0, 0], "v": [[0.5, 0], [0, 0.5]]},
                   "qf": {"kind": "observable", "preset": "q_function", "n_modes": 1}},
      "tasks": [{"op": "classify", "args": {"observable": "qf"}},
                {"op": "pushforward", "args": {"observable": "qf", "state": "s"}},
                {"op": "classify", "args": {"observable": "qf"}}]})");
  EXPECT_EQ(bad.exit_code, cli::kExitRuntime);
  EXPECT_EQ(bad.report.at("tasks").size(), 2u);
  EXPECT_EQ(bad.report.at("tasks").at(0).at("status"), "ok");
  EXPECT_EQ(bad.report.at("tasks").at(1).at("error").at("kind"), "invalid-state");
}

TEST(Runner, OutputNamesBecomeEntities) {
  const auto r = run(R"({"version": "1",
      "entities": {"qf": {"kind": "observable", "preset": "q_function", "n_modes": 1},
                   "c": {"kind": "state", "preset": "coherent", "m": [1, 2]}},
      "tasks": [{"op": "pushforward", "args": {"observable": "qf", "state": "c"}, "output_name": "d"},
                {"op": "reconstruct", "args": {"observations": [{"observable": "qf", "distribution": "d"}]}}]})");
  ASSERT_EQ(r.exit_code, cli::kExitOk);
  const json& m = r.report.at("tasks").at(1).at("outputs").at("m");
  EXPECT_NEAR(m.at(0).get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(m.at(1).get<double>(), 2.0, 1e-12);
}

TEST(Runner, SingleOpMode) {
  EXPECT_EQ(run(R"({"args": {"n_modes": 1}})", "omega").exit_code, cli::kExitOk);
  const auto filtered = run(read_file(problem("all_ops.json")), "ic-set");
  ASSERT_EQ(filtered.exit_code, cli::kExitOk);
  EXPECT_EQ(filtered.report.at("tasks").size(), 2u);
  EXPECT_EQ(run(read_file(problem("classify_qfunction.json")), "witness").exit_code, cli::kExitValidation);
}

TEST(Runner, DigestDependsOnInputsOnly) {
  const std::string a = R"({"version": "1", "tasks": [{"op": "omega", "args": {"n_modes": 1}}]})";
  const std::string b = R"({"version": "1", "tasks": [{"op": "omega", "args": {"n_modes": 2}}]})";
  const auto da = run(a).report.at("tasks").at(0).at("inputs_digest");
  EXPECT_EQ(da, run(a).report.at("tasks").at(0).at("inputs_digest"));
  EXPECT_NE(da, run(b).report.at("tasks").at(0).at("inputs_digest"));
}

TEST(Writer, SeventeenDigitsRoundTrip) {
  const double x = 0.1 + 0.2;
  const std::string s = gaussmeas::io::dump(json{{"x", x}}, -1);
  EXPECT_EQ(json::parse(s).at("x").get<double>(), x);
  EXPECT_EQ(s, "{\"x\":0.30000000000000004}");
}

// Every library operation named in the interface is reached by some task op.
TEST(Dispatch, CoversLibraryOperations) {
  const std::vector<std::string> library = {
      "omega", "is_symplectic", "psd_check", "williamson", "make_state", "weyl_transform",
      "validate_channel", "apply_channel", "observable_from_channel", "channel_from_observable",
      "channel_from_dilation", "validate_observable", "pushforward", "classify", "linear_postprocess",
      "smear", "marginal_direction", "decompose_covariant", "ic_single", "ic_finite_set",
      "subspace_union_span", "direction_coverage", "family_directions", "gaussian_witness",
      "reconstruct_gaussian", "f0_eval", "support_probe", "ic_bosonic_verdict", "ladder_ops",
      "fock_weyl_matrix", "oracle_weyl_transform", "oracle_pushforward_char"};
  std::set<std::string> reached;
  for (const auto& op : cli::dispatch_table()) reached.insert(op.library_ops.begin(), op.library_ops.end());
  for (const auto& name : library) EXPECT_TRUE(reached.count(name)) << name;

  // And the sample file exercises every task op in the dispatch table.
  const json doc = json::parse(read_file(problem("all_ops.json")));
  std::set<std::string> used;
  for (const auto& t : doc.at("tasks")) used.insert(t.at("op").get<std::string>());
  for (const auto& op : cli::dispatch_table()) EXPECT_TRUE(used.count(op.name)) << op.name;
}

TEST(Binary, ExitCodesAndDeterminism) {
  const std::string out1 = temp_path("out1.json"), out2 = temp_path("out2.json");
  const std::string all = problem("all_ops.json");
  ASSERT_EQ(run_binary("run --input " + all + " --seed 17", out1), 0);
  ASSERT_EQ(run_binary("run --input " + all + " --seed 17", out2), 0);
  EXPECT_EQ(read_file(out1), read_file(out2));
  EXPECT_EQ(json::parse(read_file(out1)).at("seed"), 17);

  ASSERT_EQ(run_binary("run --input " + all + " --seed 18", out2), 0);
  EXPECT_NE(read_file(out1), read_file(out2));

  ASSERT_EQ(run_binary("run --input " + all + " --seed 17 --output " + out2, "/dev/null"), 0);
  EXPECT_EQ(read_file(out1), read_file(out2));

  const std::string bad = temp_path("bad.json");
  std::ofstream(bad) << "{\"version\": \"1\", \"tasks\": [";
  EXPECT_EQ(run_binary("run --input " + bad, out1), 2);
  std::ofstream(bad) << R"({"version": "1", "tasks": [{"op": "classify", "args": {"observable": "ghost"}}]})";
  EXPECT_EQ(run_binary("run --input " + bad, out1), 3);
  EXPECT_EQ(run_binary("run --input /nonexistent/file.json", out1), 2);
  EXPECT_EQ(run_binary("classify --input " + problem("classify_qfunction.json"), out1), 0);
  EXPECT_EQ(run_binary("ic-set --input " + problem("ic_set_quadratures.json"), out1), 0);
  EXPECT_EQ(run_binary("op ladder-ops --input " + all, out1), 0);
  EXPECT_EQ(run_binary("run --input " + all + " --timing", out1), 0);
  EXPECT_TRUE(json::parse(read_file(out1)).at("tasks").at(0).contains("timing_ms"));
}
