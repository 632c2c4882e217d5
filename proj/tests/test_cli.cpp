#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

fs::path cli_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "binpose_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

std::string cli() { return std::string("'") + BINPOSE_CLI_PATH + "'"; }

int run_cmd(const std::string& cmd) {
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::json read_json(const fs::path& path) {
  return nlohmann::json::parse(read_bytes(path));
}

}  // namespace

TEST_CASE("cli usage errors exit 1") {
  CHECK(run_cmd(cli() + " 2>/dev/null") == 1);
  CHECK(run_cmd(cli() + " keypoints --object zoo:brick --bogus 2>/dev/null") == 1);
  CHECK(run_cmd(cli() + " estimate --object zoo:brick --scene x.ply 2>/dev/null") == 1);
  CHECK(run_cmd(cli() + " estimate --object zoo:brick --oracle 2>/dev/null") == 1);
  CHECK(run_cmd(cli() + " eval --object zoo:brick --scene a.ply 2>/dev/null") == 1);
  CHECK(run_cmd(cli() + " estimate --object zoo:brick --oracle --scene x.ply"
                        " --ablation bogus 2>/dev/null") == 1);
  CHECK(run_cmd(cli() + " --help >/dev/null") == 0);
}

TEST_CASE("cli data errors exit 2") {
  CHECK(run_cmd(cli() + " keypoints --object zoo:nonexistent 2>/dev/null") == 2);
  fs::path missing = cli_dir() / "missing.ply";
  CHECK(run_cmd(cli() + " estimate --object zoo:brick --oracle --scene " + q(missing) +
                " 2>/dev/null") == 2);
}

TEST_CASE("cli keypoints writes a valid file and prints its path") {
  fs::path out = cli_dir() / "tetra_kp.json";
  fs::path stdout_file = cli_dir() / "kp_stdout.txt";
  REQUIRE(run_cmd(cli() + " keypoints --object zoo:tetra --out " + q(out) + " > " +
                  q(stdout_file)) == 0);
  CHECK(read_bytes(stdout_file) == out.string() + "\n");

  auto j = read_json(out);
  CHECK(j.at("object") == "tetra");
  CHECK(j.at("config_hash").get<std::string>().size() == 16);
  REQUIRE(j.at("keypoints").size() == 4);
  REQUIRE(j.at("equivalents").size() == 4);
  for (const auto& group : j.at("equivalents")) CHECK(group.size() == 1);
}

TEST_CASE("cli honors BINPOSE_OUT_DIR") {
  fs::path dir = cli_dir() / "env_out";
  fs::create_directories(dir);
  REQUIRE(run_cmd("BINPOSE_OUT_DIR=" + q(dir) + " " + cli() +
                  " keypoints --object zoo:tetra >/dev/null") == 0);
  CHECK(fs::exists(dir / "tetra_keypoints.json"));
}

TEST_CASE("cli config file overrides flags") {
  fs::path cfg = cli_dir() / "seed2.json";
  std::ofstream(cfg) << "{\"seed\": 2}\n";

  fs::path via_config = cli_dir() / "kp_config.json";
  fs::path via_flag = cli_dir() / "kp_flag.json";
  REQUIRE(run_cmd(cli() + " keypoints --object zoo:hexprism --seed 1 --config " + q(cfg) +
                  " --out " + q(via_config) + " >/dev/null") == 0);
  REQUIRE(run_cmd(cli() + " keypoints --object zoo:hexprism --seed 2 --out " + q(via_flag) +
                  " >/dev/null") == 0);
  CHECK(read_bytes(via_config) == read_bytes(via_flag));

  fs::path bad_cfg = cli_dir() / "bad_key.json";
  std::ofstream(bad_cfg) << "{\"no-such-key\": 1}\n";
  CHECK(run_cmd(cli() + " keypoints --object zoo:tetra --config " + q(bad_cfg) +
                " 2>/dev/null") == 2);
}

TEST_CASE("cli synth estimate eval pipeline is deterministic and accurate") {
  fs::path scenes_a = cli_dir() / "scenes_a";
  fs::path scenes_b = cli_dir() / "scenes_b";
  fs::path poses_a = cli_dir() / "poses_a";
  fs::path poses_b = cli_dir() / "poses_b";
  fs::path poses_jobs = cli_dir() / "poses_jobs";
  for (const auto& d : {scenes_a, scenes_b, poses_a, poses_b, poses_jobs}) {
    fs::create_directories(d);
  }

  std::string synth_args =
      " synth --object zoo:brick --scenes 2 --instances 5 --seed 9 --out-dir ";
  REQUIRE(run_cmd(cli() + synth_args + q(scenes_a) + " >/dev/null") == 0);
  REQUIRE(run_cmd(cli() + synth_args + q(scenes_b) + " >/dev/null") == 0);
  for (const char* name : {"scene_0000.ply", "scene_0000.json", "scene_0001.ply",
                           "scene_0001.json"}) {
    REQUIRE(fs::exists(scenes_a / name));
    CHECK(read_bytes(scenes_a / name) == read_bytes(scenes_b / name));
  }

  std::string est_args = " estimate --object zoo:brick --oracle --sigma 0.002 --seed 3"
                         " --scenes-dir " + q(scenes_a) + " --out-dir ";
  REQUIRE(run_cmd(cli() + est_args + q(poses_a) + " >/dev/null") == 0);
  REQUIRE(run_cmd(cli() + est_args + q(poses_b) + " >/dev/null") == 0);
  REQUIRE(run_cmd(cli() + est_args + q(poses_jobs) + " --jobs 2 >/dev/null") == 0);
  for (const char* name : {"scene_0000_poses.json", "scene_0001_poses.json"}) {
    REQUIRE(fs::exists(poses_a / name));
    CHECK(read_bytes(poses_a / name) == read_bytes(poses_b / name));
    CHECK(read_bytes(poses_a / name) == read_bytes(poses_jobs / name));
  }

  fs::path metrics = cli_dir() / "metrics.json";
  fs::path pr = cli_dir() / "pr.csv";
  REQUIRE(run_cmd(cli() + " eval --object zoo:brick --scenes-dir " + q(scenes_a) +
                  " --poses-dir " + q(poses_a) + " --out " + q(metrics) + " --pr-csv " +
                  q(pr) + " >/dev/null") == 0);
  auto j = read_json(metrics);
  CHECK(j.at("object") == "brick");
  CHECK(j.at("ap").get<double>() == 1.0);
  CHECK(j.at("false_positives").get<int>() == 0);
  CHECK(j.at("eligible").get<int>() > 0);
  std::string pr_text = read_bytes(pr);
  CHECK(pr_text.rfind("recall,precision\n", 0) == 0);

  fs::path labels = cli_dir() / "labels.json";
  REQUIRE(run_cmd(cli() + " pseudo-label --object zoo:brick --scene " +
                  q(scenes_a / "scene_0000.ply") + " --poses " +
                  q(poses_a / "scene_0000_poses.json") + " --kappa 1.0 --out " + q(labels) +
                  " >/dev/null 2>/dev/null") == 0);
  auto lj = read_json(labels);
  CHECK(lj.at("n_k").get<int>() == 3);
  CHECK(lj.at("mask").size() == lj.at("n_points").get<std::size_t>());
  CHECK(lj.at("instances").size() > 0);
}
