#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <string>

#include <gtest/gtest.h>

#include "egotrack/dataio.hpp"
#include "egotrack/error.hpp"
#include "egotrack/random.hpp"
#include "egotrack/simulation.hpp"
#include "temp_dir.hpp"

namespace egotrack {
namespace {

template <typename F>
Error error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error thrown";
  return Error(ErrorCode::kInvalidArgument, "none");
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

// Builds a depth file by hand: magic, little-endian u32 width/height, then raw floats.
std::vector<std::byte> depth_bytes(std::uint32_t w, std::uint32_t h, std::size_t floats) {
  std::vector<std::byte> out;
  for (char c : std::string("D3EG")) out.push_back(static_cast<std::byte>(c));
  for (std::uint32_t v : {w, h})
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
  for (std::size_t i = 0; i < floats; ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(1.0f + static_cast<float>(i));
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::byte>((bits >> (8 * k)) & 0xff));
  }
  return out;
}

// --- poses ---

TEST(Poses, IdentityLine) {
  const auto poses = parse_poses("0 0 0 0 0 0 0 1\n");
  ASSERT_EQ(poses.size(), 1u);
  EXPECT_EQ(poses[0].rotation, Eigen::Matrix3d::Identity());
  EXPECT_EQ(poses[0].translation, Eigen::Vector3d::Zero());
  EXPECT_EQ(poses[0].timestamp, 0);
}

TEST(Poses, RoundTrip) {
  Rng rng(1);
  std::vector<CameraPose> poses;
  for (FrameIndex f = 0; f < 200; ++f) {
    const Eigen::Quaterniond q = Eigen::Quaterniond(rng.normal(), rng.normal(), rng.normal(), rng.normal()).normalized();
    poses.push_back(CameraPose::from_quaternion(q, {rng.normal(), rng.normal(), rng.normal()}, f));
  }
  const auto back = parse_poses(format_poses(poses));
  ASSERT_EQ(back.size(), poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    ASSERT_EQ(back[i].timestamp, poses[i].timestamp);
    ASSERT_LT((back[i].rotation - poses[i].rotation).cwiseAbs().maxCoeff(), 1e-9);
    ASSERT_LT((back[i].translation - poses[i].translation).norm(), 1e-9);
  }
}

TEST(Poses, Errors) {
  EXPECT_EQ(error_of([] { parse_poses("0 0 0 0 0 0 0 0.5\n"); }).code(), ErrorCode::kValidation);
  const Error short_line = error_of([] { parse_poses("# header\n0 0 0 0 0 0 0 1\n1 0 0 0 0 0 1\n"); });
  EXPECT_EQ(short_line.code(), ErrorCode::kParse);
  EXPECT_TRUE(contains(short_line.what(), "poses.txt:3:")) << short_line.what();
  EXPECT_EQ(error_of([] { parse_poses("0 0 0 x 0 0 0 1\n"); }).code(), ErrorCode::kParse);
}

// --- depth ---

TEST(Depth, TwoByTwoRoundTripsExactly) {
  DepthMap m(2, 2, std::vector<float>{1.0f, std::numeric_limits<float>::quiet_NaN(), 0.5f, 2.0f});
  const auto bytes = encode_depth(m);
  EXPECT_EQ(bytes.size(), 12u + 16u);
  EXPECT_EQ(std::memcmp(bytes.data(), "D3EG", 4), 0);
  EXPECT_TRUE(decode_depth(bytes).identical(m));
}

TEST(Depth, EncodingIsLittleEndian) {
  DepthMap m(3, 1, std::vector<float>{1.0f, 2.0f, 3.0f});
  EXPECT_EQ(encode_depth(m), depth_bytes(3, 1, 3));
}

TEST(Depth, TruncatedPayload) {
  const Error e = error_of([] { decode_depth(depth_bytes(4, 4, 15)); });
  EXPECT_EQ(e.code(), ErrorCode::kFormat);
}

TEST(Depth, ExactSizeAcceptedForAnyDimensions) {
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const auto w = static_cast<std::uint32_t>(1 + rng.below(64));
    const auto h = static_cast<std::uint32_t>(1 + rng.below(64));
    const auto bytes = depth_bytes(w, h, std::size_t{w} * h);
    ASSERT_EQ(bytes.size(), 12u + 4u * w * h);
    const DepthMap m = decode_depth(bytes);
    ASSERT_EQ(m.width(), static_cast<int>(w));
    ASSERT_EQ(m.height(), static_cast<int>(h));
    EXPECT_EQ(error_of([&] { decode_depth(depth_bytes(w, h, std::size_t{w} * h + 1)); }).code(), ErrorCode::kFormat);
  }
}

TEST(Depth, BadHeaders) {
  auto bad_magic = depth_bytes(1, 1, 1);
  bad_magic[0] = std::byte{'X'};
  EXPECT_EQ(error_of([&] { decode_depth(bad_magic); }).code(), ErrorCode::kFormat);
  auto header_only = depth_bytes(1, 1, 0);
  header_only.resize(7);
  EXPECT_EQ(error_of([&] { decode_depth(header_only); }).code(), ErrorCode::kFormat);
  EXPECT_EQ(error_of([] { decode_depth(depth_bytes(1u << 14, 1u << 14, 0)); }).code(), ErrorCode::kSizeLimit);
}

TEST(Depth, FileRoundTrip) {
  test::TempDir dir;
  DepthMap m(5, 3, 1.25f);
  m.at(4, 2) = std::numeric_limits<float>::quiet_NaN();
  write_depth(dir.path() / "d" / "x.d3eg", m);
  EXPECT_TRUE(read_depth(dir.path() / "d" / "x.d3eg").identical(m));
  const Error missing = error_of([&] { read_depth(dir.path() / "nope.d3eg"); });
  EXPECT_EQ(missing.code(), ErrorCode::kIo);
  EXPECT_TRUE(contains(missing.what(), "nope.d3eg"));
}

// --- proposals ---

Embedding unit(Rng& rng, int dim) {
  Embedding e(dim);
  for (int i = 0; i < dim; ++i) e[i] = rng.normal();
  return e.normalized();
}

TEST(Proposals, RoundTrip) {
  Rng rng(3);
  ProposalSet set;
  set.dim = 8;
  for (FrameIndex f : {0, 3, 4, 10})
    for (int k = 0; k < 3; ++k) {
      const double x = rng.uniform(0, 100), y = rng.uniform(0, 100);
      set.frames[f].push_back({{x, y, x + rng.uniform(1, 30), y + rng.uniform(1, 30)}, rng.uniform(), unit(rng, 8)});
    }
  const ProposalSet back = parse_proposals(format_proposals(set));
  EXPECT_EQ(back.dim, 8);
  ASSERT_EQ(back.frames.size(), set.frames.size());
  for (const auto& [f, ps] : set.frames) {
    const auto& qs = back.frames.at(f);
    ASSERT_EQ(qs.size(), ps.size());
    for (std::size_t k = 0; k < ps.size(); ++k) {
      EXPECT_EQ(qs[k].bbox, ps[k].bbox);
      EXPECT_EQ(qs[k].score, ps[k].score);
      EXPECT_EQ(qs[k].embedding, ps[k].embedding);
    }
  }
  EXPECT_TRUE(back.at(1).empty());
  EXPECT_EQ(back.at(3).size(), 3u);
}

TEST(Proposals, RenormalizesNearUnitAndRejectsOthers) {
  const ProposalSet ok = parse_proposals("dim 2\n0 0 0 10 10 0.5 0.6 0.8080\n");
  EXPECT_NEAR(ok.frames.at(0)[0].embedding.norm(), 1.0, 1e-15);
  EXPECT_EQ(error_of([] { parse_proposals("dim 2\n0 0 0 10 10 0.5 0 0\n"); }).code(), ErrorCode::kValidation);
  EXPECT_EQ(error_of([] { parse_proposals("dim 2\n0 0 0 10 10 0.5 0.6 0.9\n"); }).code(), ErrorCode::kValidation);
}

TEST(Proposals, DimensionMismatch) {
  EXPECT_EQ(error_of([] { parse_proposals("dim 3\n0 0 0 10 10 0.5 1 0\n"); }).code(), ErrorCode::kDimensionMismatch);
  EXPECT_EQ(error_of([] { parse_proposals("0 0 0 10 10 0.5 1 0\n"); }).code(), ErrorCode::kParse);
}

TEST(Proposals, OutOfOrderFramesSortStably) {
  Rng rng(4);
  const std::vector<std::string> lines{"5 0 0 10 10 0.1 1 0", "2 1 0 10 10 0.2 0 1", "5 2 0 10 10 0.3 0 1",
                                       "0 3 0 10 10 0.4 1 0", "2 4 0 10 10 0.5 1 0", "5 5 0 10 10 0.6 1 0"};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> shuffled = lines;
    for (std::size_t i = shuffled.size() - 1; i > 0; --i) std::swap(shuffled[i], shuffled[rng.below(i + 1)]);
    std::string text = "dim 2\n";
    for (const auto& l : shuffled) text += l + "\n";
    const ProposalSet set = parse_proposals(text);
    for (const auto& [f, ps] : set.frames) {
      // Within a frame, the file order survives: x_min values appear as in `shuffled`.
      std::vector<double> want;
      for (const auto& l : shuffled)
        if (std::stoi(l) == f) want.push_back(std::stod(l.substr(l.find(' ') + 1)));
      ASSERT_EQ(ps.size(), want.size());
      for (std::size_t k = 0; k < ps.size(); ++k) ASSERT_EQ(ps[k].bbox.x_min, want[k]);
    }
    ASSERT_EQ(set.frames.begin()->first, 0);
  }
}

// --- annotations and enrollment ---

TEST(Annotations, MinimalFileParses) {
  const auto inst = parse_annotations(
      "frames 10\n"
      "instance 3\n"
      "interval 0 9 1 2 0.5\n"
      "visible 0 9 1\n"
      "box 0 10 10 20 20\n"
      "end\n");
  ASSERT_EQ(inst.size(), 1u);
  EXPECT_EQ(inst[0].id, 3);
  EXPECT_EQ(inst[0].motion.size(), 10u);
  EXPECT_EQ(*inst[0].stationary_center(4), Point3(1, 2, 0.5));
  EXPECT_EQ(inst[0].boxes_2d.at(0), (BBox{10, 10, 20, 20}));
  EXPECT_TRUE(inst[0].visibility.at(9));
}

TEST(Annotations, RoundTrip) {
  const SceneSpec spec = presets::standard(8);
  const auto frames = generate_scene(spec);
  const auto ann = build_annotations(spec, frames);
  const auto back = parse_annotations(format_annotations(ann, spec.frame_count));
  ASSERT_EQ(back.size(), ann.size());
  for (std::size_t i = 0; i < ann.size(); ++i) {
    EXPECT_EQ(back[i].id, ann[i].id);
    EXPECT_EQ(back[i].motion, ann[i].motion);
    EXPECT_EQ(back[i].boxes_2d, ann[i].boxes_2d);
    EXPECT_EQ(back[i].visibility, ann[i].visibility);
    ASSERT_EQ(back[i].stationary_intervals.size(), ann[i].stationary_intervals.size());
    for (std::size_t k = 0; k < ann[i].stationary_intervals.size(); ++k) {
      EXPECT_EQ(back[i].stationary_intervals[k].center, ann[i].stationary_intervals[k].center);
    }
  }
}

TEST(Annotations, Errors) {
  const Error overlap = error_of([] {
    parse_annotations("frames 10\ninstance 1\ninterval 0 5 0 0 0\ninterval 5 9 1 0 0\nend\n");
  });
  EXPECT_EQ(overlap.code(), ErrorCode::kValidation);
  EXPECT_TRUE(contains(overlap.what(), "overlap")) << overlap.what();
  EXPECT_THROW(parse_annotations("frames 10\ninstance 1\nend\ninstance 1\nend\n"), Error);
  EXPECT_THROW(parse_annotations("frames 10\ninstance 1\ninterval 0 12 0 0 0\nend\n"), Error);
  EXPECT_THROW(parse_annotations("frames 10\ninstance 1\nbox 0 5 5 5 9\nend\n"), Error);
  EXPECT_THROW(parse_annotations("frames 10\ninstance 1\n"), Error);
}

TEST(Svoe, SmallBoxWarns) {
  Warnings w;
  const auto rec = parse_svoe("svoe 1 0 10 10 20 20\n", &w);
  ASSERT_EQ(rec.size(), 1u);
  EXPECT_EQ(rec[0].bbox.area(), 100.0);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_TRUE(contains(w[0], "500")) << w[0];

  Warnings none;
  parse_svoe("svoe 1 0 0 0 25 20\n", &none);
  EXPECT_TRUE(none.empty());
}

TEST(Svoe, RoundTripAndDuplicates) {
  const std::vector<SvoeRecord> recs{{1, 4, {1, 2, 40, 50}}, {2, 0, {0.5, 0.25, 30, 31}}};
  const auto back = parse_svoe(format_svoe(recs));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].bbox, recs[1].bbox);
  EXPECT_EQ(back[0].frame, 4);
  EXPECT_THROW(parse_svoe("svoe 1 0 0 0 30 30\nsvoe 1 2 0 0 30 30\n"), Error);
}

TEST(Mvpe, RoundTripWithViewsAndImages) {
  Rng rng(5);
  std::vector<MvpeRecord> recs(2);
  recs[0].instance_id = 1;
  recs[1].instance_id = 4;
  for (int v = 0; v < 5; ++v) recs[0].views.push_back(unit(rng, 6));
  recs[1].views.push_back(unit(rng, 6));
  recs[1].image_paths = {"views/4/front.png", "views/4/top.png"};
  int dim = 0;
  const auto back = parse_mvpe(format_mvpe(recs, 6), &dim);
  EXPECT_EQ(dim, 6);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].views.size(), 5u);
  EXPECT_EQ(back[0].views[3], recs[0].views[3]);
  EXPECT_EQ(back[1].image_paths, recs[1].image_paths);
  EXPECT_EQ(error_of([] { parse_mvpe("dim 2\nview 1 1 0 0\n"); }).code(), ErrorCode::kDimensionMismatch);
}

// --- trajectories and reports ---

TEST(Trajectories, RoundTrip) {
  TrajectorySet set;
  set[1].entries[0] = {{0.1, 0.2, 0.3}, Provenance::kFreshDetection};
  set[1].entries[1] = {{0.1, 0.2, 0.3}, Provenance::kMemoryCarry};
  set[1].entries[7] = {{1.0 / 3.0, -2, 5e-7}, Provenance::kKalmanSmoothed};
  set[1].reset_frames = {7};
  set[2];
  const TrajectorySet back = parse_trajectories(format_trajectories(set));
  ASSERT_EQ(back.count(1), 1u);
  EXPECT_TRUE(back.at(1) == set.at(1));
  EXPECT_THROW(parse_trajectories("1 0 0 0 0 fresh\n1 0 1 1 1 fresh\n"), Error);
  EXPECT_THROW(parse_trajectories("1 0 0 0 0 guessed\n"), Error);
}

TEST(ReportJson, RoundTripIsLossless) {
  MetricsReport r;
  r.per_threshold = {{0.25, 3, 0, 2}, {0.5, 0, 0, 5}, {1.0, 1, 2, 0}};
  r.mean_l2 = 0.1 + 0.2;
  r.mean_angular = 1.0 / 3.0;
  r.paired_count = 42;
  r.tracking_2d = Metrics2D{11.0 / 21.0, 0.5, 0.25, 8};
  const std::string text = report_to_json(r);
  EXPECT_EQ(report_from_json(text), r);
  EXPECT_EQ(report_to_json(report_from_json(text)), text);

  MetricsReport empty;
  empty.per_threshold = {{0.25, 0, 0, 0}};
  EXPECT_EQ(report_from_json(report_to_json(empty)), empty);
  EXPECT_TRUE(contains(report_to_json(empty), "null"));
}

TEST(ReportJson, RejectsMalformedInput) {
  EXPECT_EQ(error_of([] { report_from_json("{"); }).code(), ErrorCode::kParse);
  const Error e = error_of([] { report_from_json(R"({"thresholds": [{"tau": 0.25, "tp": -1, "fp": 0, "fn": 0}], "paired_count": 0})"); });
  EXPECT_EQ(e.code(), ErrorCode::kValidation);
  EXPECT_TRUE(contains(e.what(), "thresholds[0].tp")) << e.what();
}

// --- manifest and dataset ---

TEST(Manifest, FnvReferenceValues) {
  EXPECT_EQ(fnv1a64(std::string_view("")), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64(std::string_view("a")), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64(std::string_view("foobar")), 0x85944171f73967e8ULL);
}

TEST(Dataset, CrossValidation) {
  test::TempDir dir;
  SceneSpec spec = presets::perfect_information(2);
  spec.frame_count = 12;
  spec.instances[0].schedule[0].end = 11;
  export_dataset(generate_scene(spec), spec, dir.path());
  EXPECT_NO_THROW(read_dataset(dir.path()));

  std::filesystem::remove(dir.path() / layout::depth_file(11));
  const Error missing = error_of([&] { read_dataset(dir.path()); });
  EXPECT_EQ(missing.code(), ErrorCode::kIo);
  EXPECT_TRUE(contains(missing.what(), "000011.d3eg")) << missing.what();

  write_depth(dir.path() / layout::depth_file(11), DepthMap(3, 3, 1.0f));
  EXPECT_THROW(read_dataset(dir.path()), Error);
}

TEST(Dataset, ProposalsBeyondLastFrameAreRejected) {
  test::TempDir dir;
  SceneSpec spec = presets::perfect_information(2);
  spec.frame_count = 5;
  spec.instances[0].schedule[0].end = 4;
  export_dataset(generate_scene(spec), spec, dir.path());
  std::string text = read_text_file(dir.path() / layout::kProposals);
  text += "9 0 0 10 10 0.5";
  for (int i = 0; i < spec.embedding_dim; ++i) text += i == 0 ? " 1" : " 0";
  text += "\n";
  write_file_atomic(dir.path() / layout::kProposals, text);
  EXPECT_EQ(error_of([&] { read_dataset(dir.path()); }).code(), ErrorCode::kFrameMismatch);
}

}  // namespace
}  // namespace egotrack
