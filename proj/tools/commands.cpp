#include "commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "egotrack/error.hpp"

namespace egotrack::cli {

namespace fs = std::filesystem;

std::optional<Template> instance_template(const Dataset& ds, InstanceId id, const TrackOptions& opt) {
  if (opt.mode == EnrollmentMode::kSvoe) {
    const SvoeRecord* rec = ds.enrollment.svoe_for(id);
    if (rec == nullptr) return std::nullopt;
    const auto proposals = ds.proposals.at(rec->frame);
    const Proposal* best = nullptr;
    double best_iou = 0.0;
    for (const auto& p : proposals) {
      const double v = iou(p.bbox, rec->bbox);
      if (v > best_iou) {
        best_iou = v;
        best = &p;
      }
    }
    if (best == nullptr) {
      throw Error(ErrorCode::kValidation, "instance " + std::to_string(id) + ": no proposal on frame " +
                                              std::to_string(rec->frame) + " overlaps the SVOE box");
    }
    const Embedding e = best->embedding;
    return make_template(std::span<const Embedding>(&e, 1), EnrollmentMode::kSvoe);
  }
  const MvpeRecord* rec = ds.enrollment.mvpe_for(id);
  if (rec == nullptr || rec->views.empty()) return std::nullopt;
  if (opt.views < 1) throw Error(ErrorCode::kInvalidArgument, "--views must be at least 1");
  const std::size_t n = std::min(rec->views.size(), static_cast<std::size_t>(opt.views));
  if (n < static_cast<std::size_t>(opt.views)) {
    spdlog::warn("instance {}: {} views requested, {} enrolled", id, opt.views, rec->views.size());
  }
  return make_template(std::span<const Embedding>(rec->views.data(), n), EnrollmentMode::kMvpe);
}

TrajectorySet track_dataset(const Dataset& ds, const TrackOptions& opt) {
  opt.tracker.validate();
  std::vector<std::pair<InstanceId, FrameIndex>> targets;
  if (opt.mode == EnrollmentMode::kSvoe) {
    for (const auto& r : ds.enrollment.svoe) targets.emplace_back(r.instance_id, r.frame);
  } else {
    for (const auto& r : ds.enrollment.mvpe) targets.emplace_back(r.instance_id, 0);
  }
  if (targets.empty()) {
    throw Error(ErrorCode::kValidation, opt.mode == EnrollmentMode::kSvoe ? "dataset has no SVOE enrollment"
                                                                          : "dataset has no MVPE enrollment");
  }

  TrajectorySet out;
  for (const auto& [id, start] : targets) {
    const auto tmpl = instance_template(ds, id, opt);
    if (!tmpl) continue;
    if (ds.proposals.dim != 0 && tmpl->embedding.size() != ds.proposals.dim) {
      throw Error(ErrorCode::kDimensionMismatch, "instance " + std::to_string(id) + ": template dimension " +
                                                     std::to_string(tmpl->embedding.size()) +
                                                     " differs from proposal dimension " +
                                                     std::to_string(ds.proposals.dim));
    }
    const std::map<FrameIndex, bool>* visibility = nullptr;
    for (const auto& gt : ds.annotations) {
      if (gt.id == id) visibility = &gt.visibility;
    }
    InstanceTracker tracker(*tmpl, ds.intrinsics, opt.tracker);
    for (FrameIndex f = start; f < ds.frame_count(); ++f) {
      FrameObservation obs;
      obs.frame = f;
      obs.proposals = ds.proposals.at(f);
      obs.depth = &ds.depth[static_cast<std::size_t>(f)];
      obs.pose = ds.poses[static_cast<std::size_t>(f)];
      if (visibility != nullptr) {
        if (const auto it = visibility->find(f); it != visibility->end()) obs.visible = it->second;
      }
      tracker.observe(obs);
    }
    out[id] = std::move(tracker).take_trajectory();
    spdlog::debug("instance {}: {} frames, {} resets", id, out[id].entries.size(), out[id].reset_frames.size());
  }
  return out;
}

MetricsReport evaluate_dataset(const Dataset& ds, const TrajectorySet& predictions, const EvalConfig& cfg) {
  const SequenceInput seq{ds.frame_count(), ds.annotations, &predictions, ds.poses};
  return evaluate(std::span<const SequenceInput>(&seq, 1), cfg);
}

Guided2DResult guided2d_dataset(const Dataset& ds, const TrajectorySet& predictions, const TrackOptions& opt) {
  Tracking2DAccumulator unguided;
  Tracking2DAccumulator guided;
  for (const auto& [id, traj] : predictions) {
    const auto tmpl = instance_template(ds, id, opt);
    if (!tmpl) throw Error(ErrorCode::kValidation, "instance " + std::to_string(id) + " is not enrolled");
    const GroundTruthInstance* gt = nullptr;
    for (const auto& g : ds.annotations) {
      if (g.id == id) gt = &g;
    }
    if (gt == nullptr) continue;
    for (const auto& [frame, box] : gt->boxes_2d) {
      if (frame >= ds.frame_count()) throw Error(ErrorCode::kFrameMismatch, "annotation box beyond the pose list");
      const auto proposals = ds.proposals.at(frame);
      std::optional<BBox> plain;
      if (const auto m = match_proposals(proposals, *tmpl, opt.tracker.cosine_threshold)) {
        plain = proposals[m->index].bbox;
      }
      std::optional<BBox> steered = plain;
      if (const auto point = traj.at(frame)) {
        try {
          const Projection p = project_to_pixel(*point, ds.intrinsics, ds.poses[static_cast<std::size_t>(frame)]);
          steered = guided_2d_select(proposals, p.pixel, *tmpl, opt.tracker.cosine_threshold);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kBehindCamera) throw;
        }
      }
      unguided.add(plain, box);
      guided.add(steered, box);
    }
  }
  return {unguided.result(), guided.result()};
}

namespace {

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * v);
  return buf;
}

}  // namespace

std::string format_guided2d(const Guided2DResult& r) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof(line), "%-10s %8s %8s %10s %8s\n", "mode", "AUC", "Prec", "NormPrec", "Frames");
  out += line;
  for (const auto& [name, m] : {std::pair<const char*, const Metrics2D&>{"unguided", r.unguided},
                                std::pair<const char*, const Metrics2D&>{"guided", r.guided}}) {
    std::snprintf(line, sizeof(line), "%-10s %8s %8s %10s %8zu\n", name, percent(m.auc).c_str(),
                  percent(m.precision).c_str(), percent(m.normalized_precision).c_str(), m.frames);
    out += line;
  }
  return out;
}

std::string guided2d_to_json(const Guided2DResult& r) {
  auto block = [](const Metrics2D& m) {
    return nlohmann::json{{"auc", m.auc},
                          {"precision", m.precision},
                          {"normalized_precision", m.normalized_precision},
                          {"frames", m.frames}};
  };
  return nlohmann::json{{"unguided", block(r.unguided)}, {"guided", block(r.guided)}}.dump(2) + "\n";
}

Manifest simulate_to_directory(const SceneSpec& spec, const fs::path& out_dir, unsigned threads, bool overwrite) {
  spec.validate();
  std::error_code ec;
  if (fs::exists(out_dir) && !overwrite) {
    throw Error(ErrorCode::kIo, out_dir.string() + " already exists (pass --overwrite to replace it)");
  }
  fs::path staging = out_dir;
  staging += ".partial";
  fs::remove_all(staging, ec);
  const auto frames = generate_scene(spec, threads);
  Manifest m = export_dataset(frames, spec, staging);
  if (fs::exists(out_dir)) fs::remove_all(out_dir, ec);
  fs::rename(staging, out_dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot move " + staging.string() + " to " + out_dir.string() + ": " + ec.message());
  return m;
}

// --- argv front end ---

namespace {

struct TrackFlags {
  std::string enroll = "svoe";
  int views = 5;
  double cosine_threshold = 0.6;
  bool kalman = false;
  double reset_threshold = 0.15;
  bool visible_only = false;
  int depth_window = 2;

  void add_to(CLI::App& app, bool tracking) {
    app.add_option("--enroll", enroll, "Enrollment mode")->check(CLI::IsMember({"svoe", "mvpe"}));
    app.add_option("--views", views, "MVPE views averaged into the template")->check(CLI::PositiveNumber);
    app.add_option("--cosine-threshold", cosine_threshold, "Minimum cosine similarity for a detection")
        ->check(CLI::Range(-1.0, 1.0));
    if (!tracking) return;
    app.add_flag("--kalman", kalman, "Smooth with the piecewise constant-velocity Kalman filter");
    app.add_option("--reset-threshold", reset_threshold, "Kalman reset distance in meters")
        ->check(CLI::PositiveNumber);
    app.add_flag("--visible-only", visible_only, "Update memory only on frames annotated as visible");
    app.add_option("--depth-window", depth_window, "Depth fallback window radius in pixels")
        ->check(CLI::NonNegativeNumber);
  }

  TrackOptions options() const {
    TrackOptions opt;
    opt.mode = enroll == "mvpe" ? EnrollmentMode::kMvpe : EnrollmentMode::kSvoe;
    opt.views = views;
    opt.tracker.cosine_threshold = cosine_threshold;
    opt.tracker.use_kalman = kalman;
    opt.tracker.reset_threshold = reset_threshold;
    opt.tracker.visible_only_update = visible_only;
    opt.tracker.depth_window_radius = depth_window;
    return opt;
  }
};

Dataset load_dataset(const fs::path& dir) {
  Warnings warnings;
  Dataset ds = read_dataset(dir, &warnings);
  for (const auto& w : warnings) spdlog::warn("{}", w);
  return ds;
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
  } else {
    write_file_atomic(out_path, text);
  }
}

void configure_logging(const std::string& level) {
  const auto lvl = spdlog::level::from_str(level);
  // from_str maps unknown names to "off"; only accept it when asked for.
  if (lvl == spdlog::level::off && level != "off") {
    throw Error(ErrorCode::kInvalidArgument, "unknown log level '" + level + "'");
  }
  spdlog::set_level(lvl);
  spdlog::set_pattern("egotrack [%l] %v");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Egocentric 3D instance tracking toolkit", "egotrack"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  std::string log_level = "warn";
  if (const char* env = std::getenv("EGOTRACK_LOG_LEVEL"); env != nullptr && *env != '\0') log_level = env;
  app.add_option("--log-level", log_level,
                 "trace|debug|info|warn|error|critical|off (default from EGOTRACK_LOG_LEVEL, else warn)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic dataset");
  std::string spec_file;
  std::string preset = "standard";
  std::optional<std::uint64_t> seed;
  std::string sim_out;
  unsigned threads = 1;
  bool overwrite = false;
  auto* spec_opt = sim->add_option("--spec", spec_file, "Scene spec JSON file")->check(CLI::ExistingFile);
  sim->add_option("--preset", preset, "Built-in scene when no spec file is given")
      ->check(CLI::IsMember({"standard", "perfect_information", "relocation", "distractor_heavy"}))
      ->excludes(spec_opt);
  sim->add_option("--seed", seed, "Scene seed (overrides the spec file)");
  sim->add_option("--out", sim_out, "Output dataset directory")->required();
  sim->add_option("--threads", threads, "Frame generation threads")->check(CLI::PositiveNumber);
  sim->add_flag("--overwrite", overwrite, "Replace an existing output directory");

  // track
  auto* track = app.add_subcommand("track", "Track every enrolled instance through a dataset");
  std::string track_dataset_dir;
  std::string track_out;
  TrackFlags track_flags;
  track->add_option("--dataset", track_dataset_dir, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  track_flags.add_to(*track, true);
  track->add_option("--out", track_out, "Trajectories file to write")->required();

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Score trajectories against dataset annotations");
  std::string eval_dataset_dir;
  std::string eval_traj;
  std::vector<double> thresholds{0.25, 0.5, 0.75, 1.0, 1.5};
  bool identity_aware = false;
  std::string report_fmt = "text";
  std::string eval_out;
  bool with_2d = false;
  TrackFlags eval_flags;
  eval->add_option("--dataset", eval_dataset_dir, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--trajectories", eval_traj, "Trajectories file")->required()->check(CLI::ExistingFile);
  eval->add_option("--thresholds", thresholds, "Distance thresholds in meters, comma separated")->delimiter(',');
  eval->add_flag("--identity-aware", identity_aware, "Match predictions only to their own instance");
  eval->add_option("--report", report_fmt, "Report format")->check(CLI::IsMember({"text", "json"}));
  eval->add_option("--out", eval_out, "Write the report here instead of stdout");
  eval->add_flag("--with-2d", with_2d, "Add the guided 2D tracking block");
  eval_flags.add_to(*eval, false);

  // guided2d
  auto* g2d = app.add_subcommand("guided2d", "2D tracking metrics with and without 3D guidance");
  std::string g2d_dataset_dir;
  std::string g2d_traj;
  std::string g2d_fmt = "text";
  std::string g2d_out;
  TrackFlags g2d_flags;
  g2d->add_option("--dataset", g2d_dataset_dir, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  g2d->add_option("--trajectories", g2d_traj, "Trajectories file")->required()->check(CLI::ExistingFile);
  g2d_flags.add_to(*g2d, false);
  g2d->add_option("--report", g2d_fmt, "Report format")->check(CLI::IsMember({"text", "json"}));
  g2d->add_option("--out", g2d_out, "Write the table here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    configure_logging(log_level);
    if (sim->parsed()) {
      SceneSpec spec;
      if (!spec_file.empty()) {
        spec = read_scene_spec(spec_file);
        if (seed) spec.seed = *seed;
      } else {
        const std::uint64_t s = seed.value_or(0);
        if (preset == "perfect_information") {
          spec = presets::perfect_information(s);
        } else if (preset == "relocation") {
          spec = presets::relocation(s, 0.05);
        } else if (preset == "distractor_heavy") {
          spec = presets::distractor_heavy(s);
        } else {
          spec = presets::standard(s);
        }
      }
      const Manifest m = simulate_to_directory(spec, sim_out, threads, overwrite);
      char digest[24];
      std::snprintf(digest, sizeof(digest), "%016llx", static_cast<unsigned long long>(m.digest()));
      out << "wrote " << m.entries.size() << " files to " << sim_out << " (manifest " << digest << ")\n";
    } else if (track->parsed()) {
      const Dataset ds = load_dataset(track_dataset_dir);
      const TrajectorySet set = track_dataset(ds, track_flags.options());
      write_trajectories(track_out, set);
      out << "wrote " << set.size() << " trajectories to " << track_out << "\n";
    } else if (eval->parsed()) {
      EvalConfig cfg;
      cfg.thresholds = thresholds;
      cfg.identity_aware = identity_aware;
      cfg.validate();
      const Dataset ds = load_dataset(eval_dataset_dir);
      const TrajectorySet preds = read_trajectories(eval_traj);
      MetricsReport report = evaluate_dataset(ds, preds, cfg);
      if (with_2d) report.tracking_2d = guided2d_dataset(ds, preds, eval_flags.options()).guided;
      emit(report_fmt == "json" ? report_to_json(report) : format_report_table(report), eval_out, out);
    } else if (g2d->parsed()) {
      const Dataset ds = load_dataset(g2d_dataset_dir);
      const TrajectorySet preds = read_trajectories(g2d_traj);
      const Guided2DResult r = guided2d_dataset(ds, preds, g2d_flags.options());
      emit(g2d_fmt == "json" ? guided2d_to_json(r) : format_guided2d(r), g2d_out, out);
    }
  } catch (const Error& e) {
    err << "egotrack: error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "egotrack: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace egotrack::cli
