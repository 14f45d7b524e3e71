#include <filesystem>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "commands.hpp"
#include "egotrack/dataio.hpp"
#include "egotrack/simulation.hpp"
#include "temp_dir.hpp"

namespace egotrack {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::initializer_list<std::string> args) {
  std::vector<std::string> owned{"egotrack"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : owned) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

class CliTest : public ::testing::Test {
 protected:
  fs::path path(const std::string& name) const { return dir_.path() / name; }

  // Small dataset written through the simulate subcommand.
  fs::path simulate(const std::string& preset, const std::string& seed, const std::string& name = "ds") {
    const Result r = run({"simulate", "--preset", preset, "--seed", seed, "--out", path(name).string()});
    EXPECT_EQ(r.code, 0) << r.err;
    return path(name);
  }

  test::TempDir dir_;
};

TEST_F(CliTest, UnknownFlagIsUsageError) {
  const Result r = run({"track", "--no-such-flag"});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
}

TEST_F(CliTest, HelpDocumentsEveryFlagAndDefault) {
  const std::vector<std::pair<std::string, std::vector<std::string>>> expected{
      {"simulate", {"--spec", "--preset", "[standard]", "--seed", "--out", "--threads", "[1]", "--overwrite"}},
      {"track",
       {"--dataset", "--enroll", "[svoe]", "--views", "[5]", "--cosine-threshold", "[0.6]", "--kalman",
        "--reset-threshold", "[0.15]", "--visible-only", "--depth-window", "[2]", "--out"}},
      {"evaluate",
       {"--dataset", "--trajectories", "--thresholds", "[[0.25,0.5,0.75,1,1.5]]", "--identity-aware", "--report",
        "[text]", "--out", "--with-2d", "--enroll", "--views", "--cosine-threshold"}},
      {"guided2d", {"--dataset", "--trajectories", "--enroll", "--views", "--cosine-threshold", "--report", "--out"}},
  };
  for (const auto& [cmd, flags] : expected) {
    const Result r = run({cmd, "--help"});
    EXPECT_EQ(r.code, 0) << cmd;
    for (const auto& f : flags) EXPECT_TRUE(contains(r.out, f)) << cmd << " help lacks " << f << "\n" << r.out;
  }
  EXPECT_TRUE(contains(run({"--help"}).out, "--log-level"));
}

TEST_F(CliTest, SameSeedSameManifest) {
  const fs::path a = simulate("standard", "11", "a");
  const fs::path b = simulate("standard", "11", "b");
  const fs::path c = simulate("standard", "12", "c");
  const std::string ma = read_text_file(a / layout::kManifest);
  EXPECT_EQ(ma, read_text_file(b / layout::kManifest));
  EXPECT_NE(ma, read_text_file(c / layout::kManifest));
  EXPECT_NO_THROW(read_dataset(a));
}

TEST_F(CliTest, SimulateRefusesToOverwriteUnlessAsked) {
  const fs::path ds = simulate("perfect_information", "1");
  const Result again = run({"simulate", "--preset", "perfect_information", "--out", ds.string()});
  EXPECT_EQ(again.code, 1);
  EXPECT_FALSE(fs::exists(ds.string() + ".partial"));
  EXPECT_EQ(run({"simulate", "--preset", "perfect_information", "--out", ds.string(), "--overwrite"}).code, 0);
}

TEST_F(CliTest, BadSpecFieldFailsWithFieldPath) {
  write_file_atomic(path("spec.json"), std::string_view(R"({"preset": "standard", "depth_dropout": 1.5})"));
  const Result r = run({"simulate", "--spec", path("spec.json").string(), "--out", path("ds").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(contains(r.err, "depth_dropout")) << r.err;
  EXPECT_FALSE(fs::exists(path("ds")));
  EXPECT_FALSE(fs::exists(path("ds.partial")));
}

TEST_F(CliTest, SpecFileWithSeedOverride) {
  write_file_atomic(path("spec.json"), std::string_view(R"({"preset": "perfect_information", "frame_count": 20,
    "instances": [{"id": 1, "radius": 0.05, "schedule": [{"start": 0, "end": 19, "position": [0, 0, 0.8]}]}]})"));
  const Result r = run({"simulate", "--spec", path("spec.json").string(), "--seed", "4", "--out", path("ds").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_dataset(path("ds")).frame_count(), 20);
}

TEST_F(CliTest, GroundTruthAsPredictionScoresPerfectly) {
  const fs::path ds = simulate("standard", "3");
  const Dataset data = read_dataset(ds);
  TrajectorySet gt;
  for (const auto& inst : data.annotations)
    for (const auto& [f, c] : inst.stationary_track()) gt[inst.id].entries[f] = {c, Provenance::kFreshDetection};
  write_trajectories(path("gt.txt"), gt);

  const Result r = run({"evaluate", "--dataset", ds.string(), "--trajectories", path("gt.txt").string(), "--report",
                        "json", "--out", path("report.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const MetricsReport report = report_from_json(read_text_file(path("report.json")));
  ASSERT_EQ(report.per_threshold.size(), 5u);
  for (const auto& c : report.per_threshold) {
    EXPECT_DOUBLE_EQ(*c.precision(), 1.0);
    EXPECT_DOUBLE_EQ(*c.recall(), 1.0);
  }
  EXPECT_DOUBLE_EQ(*report.mean_l2, 0.0);
}

TEST_F(CliTest, EmptyTrajectoriesGiveZeroRecallAndUndefinedPrecision) {
  const fs::path ds = simulate("perfect_information", "2");
  write_file_atomic(path("empty.txt"), std::string_view(""));
  const Result json = run({"evaluate", "--dataset", ds.string(), "--trajectories", path("empty.txt").string(),
                           "--report", "json"});
  ASSERT_EQ(json.code, 0) << json.err;
  const MetricsReport report = report_from_json(json.out);
  for (const auto& c : report.per_threshold) {
    EXPECT_FALSE(c.precision().has_value());
    EXPECT_DOUBLE_EQ(*c.recall(), 0.0);
  }
  const Result text = run({"evaluate", "--dataset", ds.string(), "--trajectories", path("empty.txt").string()});
  EXPECT_TRUE(contains(text.out, "n/a")) << text.out;
}

TEST_F(CliTest, CustomThresholds) {
  const fs::path ds = simulate("perfect_information", "2");
  write_file_atomic(path("empty.txt"), std::string_view(""));
  const Result r = run({"evaluate", "--dataset", ds.string(), "--trajectories", path("empty.txt").string(),
                        "--thresholds", "0.1,0.2", "--report", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(report_from_json(r.out).per_threshold.size(), 2u);
  EXPECT_EQ(run({"evaluate", "--dataset", ds.string(), "--trajectories", path("empty.txt").string(), "--thresholds",
                 "0.5,0.2"})
                .code,
            1);
}

TEST_F(CliTest, PerfectInformationTrackMatchesGroundTruth) {
  const fs::path ds = simulate("perfect_information", "5");
  ASSERT_EQ(run({"track", "--dataset", ds.string(), "--enroll", "mvpe", "--out", path("t.txt").string()}).code, 0);
  const Result r = run({"evaluate", "--dataset", ds.string(), "--trajectories", path("t.txt").string(), "--report",
                        "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const MetricsReport report = report_from_json(r.out);
  EXPECT_DOUBLE_EQ(*report.per_threshold[0].precision(), 1.0);
  EXPECT_DOUBLE_EQ(*report.per_threshold[0].recall(), 1.0);
}

TEST_F(CliTest, KalmanDefaultsRunEndToEnd) {
  const fs::path ds = simulate("relocation", "7");
  const Result r = run({"track", "--dataset", ds.string(), "--kalman", "--out", path("k.txt").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const TrajectorySet set = read_trajectories(path("k.txt"));
  ASSERT_EQ(set.size(), 1u);
  EXPECT_FALSE(set.begin()->second.reset_frames.empty());
  bool smoothed = false;
  for (const auto& [f, e] : set.begin()->second.entries) smoothed |= e.provenance == Provenance::kKalmanSmoothed;
  EXPECT_TRUE(smoothed);
}

TEST_F(CliTest, MissingEnrollmentForModeFails) {
  const fs::path ds = simulate("perfect_information", "1");
  fs::remove(ds / layout::kMvpe);
  const Result r = run({"track", "--dataset", ds.string(), "--enroll", "mvpe", "--out", path("t.txt").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(fs::exists(path("t.txt")));
  EXPECT_EQ(run({"track", "--dataset", ds.string(), "--out", path("t.txt").string()}).code, 0);
}

TEST_F(CliTest, MissingProposalsFileFails) {
  const fs::path ds = simulate("perfect_information", "1");
  ASSERT_EQ(run({"track", "--dataset", ds.string(), "--out", path("t.txt").string()}).code, 0);
  fs::remove(ds / layout::kProposals);
  const Result r = run({"guided2d", "--dataset", ds.string(), "--trajectories", path("t.txt").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(contains(r.err, "proposals.txt")) << r.err;
}

TEST_F(CliTest, SingleProposalPerFrameMakesGuidanceIrrelevant) {
  SceneSpec spec = presets::perfect_information(3);
  spec.distractors_per_frame = 0;
  const Manifest m = cli::simulate_to_directory(spec, path("ds"), 1, false);
  ASSERT_FALSE(m.entries.empty());
  ASSERT_EQ(run({"track", "--dataset", path("ds").string(), "--out", path("t.txt").string()}).code, 0);
  const Result r = run({"guided2d", "--dataset", path("ds").string(), "--trajectories", path("t.txt").string(),
                        "--report", "json", "--out", path("g.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Dataset ds = read_dataset(path("ds"));
  const auto res = cli::guided2d_dataset(ds, read_trajectories(path("t.txt")), {});
  EXPECT_EQ(res.guided, res.unguided);
  EXPECT_GT(res.guided.frames, 0u);
  EXPECT_EQ(read_text_file(path("g.json")), cli::guided2d_to_json(res));
}

TEST_F(CliTest, EvaluateWith2dAddsBlock) {
  const fs::path ds = simulate("perfect_information", "4");
  ASSERT_EQ(run({"track", "--dataset", ds.string(), "--out", path("t.txt").string()}).code, 0);
  const Result r = run({"evaluate", "--dataset", ds.string(), "--trajectories", path("t.txt").string(), "--with-2d"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "2D: AUC")) << r.out;
}

TEST_F(CliTest, TrajectoriesOutsideFrameRangeFail) {
  const fs::path ds = simulate("perfect_information", "1");
  write_file_atomic(path("bad.txt"), std::string_view("1 5000 0 0 0 fresh\n"));
  const Result r = run({"evaluate", "--dataset", ds.string(), "--trajectories", path("bad.txt").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.err.empty());
}

}  // namespace
}  // namespace egotrack
