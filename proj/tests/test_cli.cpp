#include <gtest/gtest.h>

#include <cstdlib>
#include <sys/wait.h>

#include "shotfusion/io.hpp"
#include "support.hpp"

using testing_support::read_file;
using testing_support::ScratchDir;
using testing_support::write_file;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out, err;
};

Run cli(const ScratchDir& dir, const std::string& args) {
  const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + SHOTFUSION_CLI + "\" " + args + " >\"" + out.string() +
                          "\" 2>\"" + err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, read_file(out), read_file(err)};
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST(Cli, EndToEndWorkflow) {
  ScratchDir dir;
  write_file(dir / "train.json", R"({"duration_s": 90, "shot_count": 30, "distractor_rate_per_min": 3, "seed": 21})");
  write_file(dir / "test.json", R"({"duration_s": 40, "shot_count": 20, "seed": 22})");
  ASSERT_EQ(cli(dir, "synth --config " + q(dir / "train.json") + " --out-dir " + q(dir / "train")).status, 0);
  ASSERT_EQ(cli(dir, "synth --config " + q(dir / "test.json") + " --out-dir " + q(dir / "test")).status, 0);
  for (const char* f : {"audio.wav", "imu.csv", "labels.csv", "config.json"}) {
    EXPECT_TRUE(fs::exists(dir / "train" / f)) << f;
  }

  auto r = cli(dir, "train-filter --data " + q(dir / "train") + " --out " + q(dir / "filter.json") + " --epochs 60");
  ASSERT_EQ(r.status, 0) << r.err;
  const auto filter = shotfusion::io::read_json(dir / "filter.json");
  EXPECT_EQ(filter.at("weights").size(), 23U);
  EXPECT_EQ(filter.at("sample_rate"), 8000);

  r = cli(dir, "train-forest --data " + q(dir / "train") + " --filter " + q(dir / "filter.json") + " --out " +
                   q(dir / "forest.json") + " --trees 20");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(shotfusion::io::read_json(dir / "forest.json").at("tree_count"), 20);

  r = cli(dir, "sync --audio " + q(dir / "test" / "audio.wav") + " --imu " + q(dir / "test" / "imu.csv") +
                   " --filter " + q(dir / "filter.json"));
  ASSERT_EQ(r.status, 0) << r.err;
  const auto sync = nlohmann::json::parse(r.out);
  EXPECT_NEAR(sync.at("offset_ms").get<double>(), -270.0, 40.0);

  r = cli(dir, "detect --audio " + q(dir / "test" / "audio.wav") + " --imu " + q(dir / "test" / "imu.csv") +
                   " --filter " + q(dir / "filter.json") + " --forest " + q(dir / "forest.json") + " --labels " +
                   q(dir / "test" / "labels.csv") + " --out-dir " + q(dir / "det"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "det" / "detections.csv"));
  EXPECT_GE(shotfusion::io::read_json(dir / "det" / "eval.json").at("f_score").get<double>(), 0.9);

  r = cli(dir, "eval --events " + q(dir / "det" / "detections.csv") + " --labels " + q(dir / "test" / "labels.csv"));
  ASSERT_EQ(r.status, 0) << r.err;
  const auto report = nlohmann::json::parse(r.out);
  EXPECT_EQ(report.at("match_tolerance_ms"), 100.0);
  EXPECT_EQ(report.at("true_positives").get<int>() + report.at("false_negatives").get<int>(), 20);

  r = cli(dir, "detect --audio " + q(dir / "test" / "audio.wav") + " --filter " + q(dir / "filter.json") +
                   " --audio-only --out-dir " + q(dir / "audio_only"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "audio_only" / "detections.csv"));
  EXPECT_FALSE(fs::exists(dir / "audio_only" / "sync.json"));
}

TEST(Cli, MissingModelExitsNonzero) {
  ScratchDir dir;
  write_file(dir / "c.json", R"({"duration_s": 10, "shot_count": 3})");
  ASSERT_EQ(cli(dir, "synth --config " + q(dir / "c.json") + " --out-dir " + q(dir / "rec")).status, 0);
  const auto r = cli(dir, "detect --audio " + q(dir / "rec" / "audio.wav") + " --imu " + q(dir / "rec" / "imu.csv") +
                              " --filter " + q(dir / "nothing.json") + " --forest " + q(dir / "nothing.json"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("model not found"), std::string::npos) << r.err;
}

TEST(Cli, BadInputsReportErrors) {
  ScratchDir dir;
  write_file(dir / "imu.csv", "t_ms,ax,ay,az,gx,gy,gz\n0,9.5,0,0,0,0,0\n");
  write_file(dir / "labels.csv", "t_ms\n100\n");
  auto r = cli(dir, "eval --events " + q(dir / "imu.csv") + " --labels " + q(dir / "labels.csv"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  r = cli(dir, "no-such-command");
  EXPECT_NE(r.status, 0);
  write_file(dir / "bad.json", R"({"duration_s": 5, "shot_count": 50})");
  r = cli(dir, "synth --config " + q(dir / "bad.json") + " --out-dir " + q(dir / "x"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("cannot place shots"), std::string::npos) << r.err;
}
