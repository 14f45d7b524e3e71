#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "egotrack/dataio.hpp"
#include "egotrack/error.hpp"
#include "egotrack/simulation.hpp"

namespace egotrack {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string(what) + ": " + e.what());
  }
}

/// Typed access to a JSON object with field-path error messages.
class Fields {
 public:
  Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& msg) {
    throw Error(ErrorCode::kValidation, (path.empty() ? std::string("<root>") : path) + ": " + msg);
  }

  std::string child(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  bool has(std::string_view key) const { return obj_.contains(std::string(key)); }

  const json& raw(std::string_view key) const {
    seen_.insert(std::string(key));
    return obj_.at(std::string(key));
  }

  template <typename T>
  void get(std::string_view key, T& out) const {
    if (!has(key)) return;
    const json& v = raw(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) fail(child(key), "expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) fail(child(key), "expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.is_number_integer() && !v.is_number_unsigned()) fail(child(key), "expected a non-negative integer");
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) fail(child(key), "expected a number");
      }
      out = v.get<T>();
    } catch (const json::exception& e) {
      fail(child(key), e.what());
    }
  }

  void reject_unknown() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) fail(child(key), "unknown field");
    }
  }

  const std::string& path() const { return path_; }

 private:
  const json& obj_;
  std::string path_;
  mutable std::set<std::string> seen_;
};

Eigen::Vector3d read_vec3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) Fields::fail(path, "expected an array of 3 numbers");
  Eigen::Vector3d out;
  for (int k = 0; k < 3; ++k) {
    if (!v[static_cast<std::size_t>(k)].is_number()) Fields::fail(path, "expected an array of 3 numbers");
    out[k] = v[static_cast<std::size_t>(k)].get<double>();
  }
  return out;
}

json vec3(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

// --- metrics report ---

std::string report_to_json(const MetricsReport& report) {
  json j;
  j["thresholds"] = json::array();
  for (const auto& t : report.per_threshold) {
    j["thresholds"].push_back({{"tau", t.tau},
                               {"tp", t.tp},
                               {"fp", t.fp},
                               {"fn", t.fn},
                               {"precision", optional_number(t.precision())},
                               {"recall", optional_number(t.recall())}});
  }
  j["mean_l2"] = optional_number(report.mean_l2);
  j["mean_angular"] = optional_number(report.mean_angular);
  j["paired_count"] = report.paired_count;
  if (report.tracking_2d) {
    const auto& m = *report.tracking_2d;
    j["tracking_2d"] = {{"auc", m.auc},
                        {"precision", m.precision},
                        {"normalized_precision", m.normalized_precision},
                        {"frames", m.frames}};
  }
  return j.dump(2) + "\n";
}

MetricsReport report_from_json(std::string_view text) {
  const json j = parse_json(text, "report");
  MetricsReport r;
  const Fields top(j, "");
  if (!top.has("thresholds") || !top.raw("thresholds").is_array()) Fields::fail("thresholds", "expected an array");
  std::size_t i = 0;
  for (const auto& tj : top.raw("thresholds")) {
    const Fields f(tj, "thresholds[" + std::to_string(i++) + "]");
    ThresholdCounts t;
    f.get("tau", t.tau);
    f.get("tp", t.tp);
    f.get("fp", t.fp);
    f.get("fn", t.fn);
    if (f.has("precision")) f.raw("precision");  // derived
    if (f.has("recall")) f.raw("recall");
    f.reject_unknown();
    r.per_threshold.push_back(t);
  }
  auto optional_field = [&](std::string_view key, std::optional<double>& out) {
    if (!top.has(key) || top.raw(key).is_null()) return;
    double v = 0.0;
    top.get(key, v);
    out = v;
  };
  optional_field("mean_l2", r.mean_l2);
  optional_field("mean_angular", r.mean_angular);
  top.get("paired_count", r.paired_count);
  if (top.has("tracking_2d")) {
    const Fields f(top.raw("tracking_2d"), "tracking_2d");
    Metrics2D m;
    f.get("auc", m.auc);
    f.get("precision", m.precision);
    f.get("normalized_precision", m.normalized_precision);
    f.get("frames", m.frames);
    f.reject_unknown();
    r.tracking_2d = m;
  }
  top.reject_unknown();
  return r;
}

// --- scene spec ---

std::string scene_spec_to_json(const SceneSpec& s) {
  json j;
  j["seed"] = s.seed;
  j["frame_count"] = s.frame_count;
  j["intrinsics"] = {{"fx", s.intrinsics.fx}, {"fy", s.intrinsics.fy},       {"cx", s.intrinsics.cx},
                     {"cy", s.intrinsics.cy}, {"width", s.intrinsics.width}, {"height", s.intrinsics.height}};
  j["room"] = {{"min", vec3(s.room.min())}, {"max", vec3(s.room.max())}};
  j["embedding_dim"] = s.embedding_dim;
  j["instances"] = json::array();
  for (const auto& inst : s.instances) {
    json ij;
    ij["id"] = inst.id;
    if (inst.embedding.size() > 0) {
      ij["embedding"] = std::vector<double>(inst.embedding.data(), inst.embedding.data() + inst.embedding.size());
    }
    ij["radius"] = inst.radius;
    ij["schedule"] = json::array();
    for (const auto& p : inst.schedule) {
      ij["schedule"].push_back({{"start", p.start}, {"end", p.end}, {"position", vec3(p.position)}});
    }
    j["instances"].push_back(ij);
  }
  j["distractors_per_frame"] = s.distractors_per_frame;
  j["lookalikes_per_frame"] = s.lookalikes_per_frame;
  j["lookalike_similarity_min"] = s.lookalike_similarity_min;
  j["lookalike_similarity_max"] = s.lookalike_similarity_max;
  j["lookalike_background_only"] = s.lookalike_background_only;
  j["embedding_noise"] = s.embedding_noise;
  j["depth_noise"] = s.depth_noise;
  j["depth_dropout"] = s.depth_dropout;
  j["depth_range"] = s.depth_range;
  j["occlusion"] = s.occlusion;
  j["waypoints"] = json::array();
  for (const auto& w : s.waypoints) j["waypoints"].push_back({{"position", vec3(w.position)}, {"look_at", vec3(w.look_at)}});
  j["angular_jitter"] = s.angular_jitter;
  j["svoe_min_area"] = s.svoe_min_area;
  j["mvpe_views"] = s.mvpe_views;
  j["mvpe_view_noise"] = s.mvpe_view_noise;
  j["box_stride"] = s.box_stride;
  return j.dump(2) + "\n";
}

SceneSpec scene_spec_from_json(std::string_view text) {
  const json j = parse_json(text, "scene spec");
  const Fields top(j, "");

  std::uint64_t seed = 0;
  top.get("seed", seed);
  SceneSpec s;
  if (top.has("preset")) {
    std::string name;
    top.get("preset", name);
    if (name == "standard") {
      s = presets::standard(seed);
    } else if (name == "perfect_information") {
      s = presets::perfect_information(seed);
    } else if (name == "relocation") {
      s = presets::relocation(seed, 0.05);
    } else if (name == "distractor_heavy") {
      s = presets::distractor_heavy(seed);
    } else {
      Fields::fail("preset", "unknown preset '" + name + "'");
    }
  }
  s.seed = seed;
  top.get("frame_count", s.frame_count);
  if (top.has("intrinsics")) {
    const Fields f(top.raw("intrinsics"), "intrinsics");
    f.get("fx", s.intrinsics.fx);
    f.get("fy", s.intrinsics.fy);
    f.get("cx", s.intrinsics.cx);
    f.get("cy", s.intrinsics.cy);
    f.get("width", s.intrinsics.width);
    f.get("height", s.intrinsics.height);
    f.reject_unknown();
  }
  if (top.has("room")) {
    const Fields f(top.raw("room"), "room");
    if (f.has("min")) s.room.min() = read_vec3(f.raw("min"), "room.min");
    if (f.has("max")) s.room.max() = read_vec3(f.raw("max"), "room.max");
    f.reject_unknown();
  }
  top.get("embedding_dim", s.embedding_dim);
  if (top.has("instances")) {
    const json& arr = top.raw("instances");
    if (!arr.is_array()) Fields::fail("instances", "expected an array");
    s.instances.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "instances[" + std::to_string(i) + "]";
      const Fields f(arr[i], path);
      InstanceSpec inst;
      f.get("id", inst.id);
      f.get("radius", inst.radius);
      if (f.has("embedding")) {
        std::vector<double> e;
        f.get("embedding", e);
        inst.embedding = Eigen::Map<const Eigen::VectorXd>(e.data(), static_cast<Eigen::Index>(e.size()));
      }
      if (f.has("schedule")) {
        const json& sched = f.raw("schedule");
        if (!sched.is_array()) Fields::fail(path + ".schedule", "expected an array");
        for (std::size_t k = 0; k < sched.size(); ++k) {
          const std::string ppath = path + ".schedule[" + std::to_string(k) + "]";
          const Fields pf(sched[k], ppath);
          Placement p;
          pf.get("start", p.start);
          pf.get("end", p.end);
          if (pf.has("position")) p.position = read_vec3(pf.raw("position"), ppath + ".position");
          pf.reject_unknown();
          inst.schedule.push_back(p);
        }
      }
      f.reject_unknown();
      s.instances.push_back(std::move(inst));
    }
  }
  top.get("distractors_per_frame", s.distractors_per_frame);
  top.get("lookalikes_per_frame", s.lookalikes_per_frame);
  top.get("lookalike_similarity_min", s.lookalike_similarity_min);
  top.get("lookalike_similarity_max", s.lookalike_similarity_max);
  top.get("lookalike_background_only", s.lookalike_background_only);
  top.get("embedding_noise", s.embedding_noise);
  top.get("depth_noise", s.depth_noise);
  top.get("depth_dropout", s.depth_dropout);
  top.get("depth_range", s.depth_range);
  top.get("occlusion", s.occlusion);
  if (top.has("waypoints")) {
    const json& arr = top.raw("waypoints");
    if (!arr.is_array()) Fields::fail("waypoints", "expected an array");
    s.waypoints.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "waypoints[" + std::to_string(i) + "]";
      const Fields f(arr[i], path);
      CameraWaypoint w;
      if (f.has("position")) w.position = read_vec3(f.raw("position"), path + ".position");
      if (f.has("look_at")) w.look_at = read_vec3(f.raw("look_at"), path + ".look_at");
      f.reject_unknown();
      s.waypoints.push_back(w);
    }
  }
  top.get("angular_jitter", s.angular_jitter);
  top.get("svoe_min_area", s.svoe_min_area);
  top.get("mvpe_views", s.mvpe_views);
  top.get("mvpe_view_noise", s.mvpe_view_noise);
  top.get("box_stride", s.box_stride);
  top.reject_unknown();
  s.validate();
  return s;
}

SceneSpec read_scene_spec(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return scene_spec_from_json(text);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

}  // namespace egotrack
