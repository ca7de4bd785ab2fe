#include "navkf/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace navkf {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string_view trimmed(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool try_parse_double(std::string_view s, double& out) {
  s = trimmed(s);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool try_parse_i64(std::string_view s, std::int64_t& out) {
  s = trimmed(s);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

double parse_double(std::string_view s, const std::string& path, size_t line) {
  double v;
  if (!try_parse_double(s, v)) {
    throw ParseError(path + ":" + std::to_string(line) + ": bad number '" +
                     std::string(s) + "'");
  }
  return v;
}

std::int64_t parse_i64(std::string_view s, const std::string& path,
                       size_t line) {
  std::int64_t v;
  if (!try_parse_i64(s, v)) {
    throw ParseError(path + ":" + std::to_string(line) + ": bad integer '" +
                     std::string(s) + "'");
  }
  return v;
}

// Shortest decimal representation that round-trips.
void append_number(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

void append_number(std::string& out, std::int64_t v) {
  char buf[24];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

// Iterate the data lines of a CSV file. Skips blank lines and an optional
// single header line (a first line whose first field is not a number).
template <typename Fn>
void for_each_csv_row(const std::string& path, size_t expected_fields,
                      Fn&& fn) {
  const std::string content = read_file(path);
  size_t line_no = 0;
  size_t start = 0;
  bool first_data_candidate = true;
  while (start < content.size()) {
    size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    ++line_no;
    std::string line = content.substr(start, end - start);
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trimmed(line).empty()) continue;
    if (trimmed(line).front() == '#') continue;
    auto fields = split(line, ',');
    if (first_data_candidate) {
      first_data_candidate = false;
      double probe;
      if (!try_parse_double(fields[0], probe)) continue;  // header line
    }
    if (fields.size() != expected_fields) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(expected_fields) + " fields, got " +
                       std::to_string(fields.size()));
    }
    fn(fields, line_no);
  }
}

void check_monotone(std::int64_t prev, std::int64_t cur,
                    const std::string& path, size_t line) {
  if (cur <= prev) {
    throw NonMonotoneTime(path + ":" + std::to_string(line) +
                          ": timestamp does not increase");
  }
}

}  // namespace

std::vector<ImuSample> read_imu_csv(const std::string& path) {
  std::vector<ImuSample> out;
  std::int64_t prev = std::numeric_limits<std::int64_t>::min();
  for_each_csv_row(path, 7, [&](const std::vector<std::string>& f, size_t ln) {
    ImuSample s;
    s.t_ns = parse_i64(f[0], path, ln);
    check_monotone(prev, s.t_ns, path, ln);
    prev = s.t_ns;
    for (int i = 0; i < 3; ++i) s.omega_m(i) = parse_double(f[1 + i], path, ln);
    for (int i = 0; i < 3; ++i) s.accel_m(i) = parse_double(f[4 + i], path, ln);
    out.push_back(s);
  });
  return out;
}

void write_imu_csv(const std::string& path,
                   const std::vector<ImuSample>& samples) {
  std::string out = "#timestamp_ns,w_x,w_y,w_z,a_x,a_y,a_z\n";
  for (const ImuSample& s : samples) {
    append_number(out, s.t_ns);
    for (int i = 0; i < 3; ++i) {
      out += ',';
      append_number(out, s.omega_m(i));
    }
    for (int i = 0; i < 3; ++i) {
      out += ',';
      append_number(out, s.accel_m(i));
    }
    out += '\n';
  }
  write_file(path, out);
}

std::vector<StateRow> read_state_csv(const std::string& path) {
  std::vector<StateRow> out;
  std::int64_t prev = std::numeric_limits<std::int64_t>::min();
  for_each_csv_row(path, 17, [&](const std::vector<std::string>& f, size_t ln) {
    StateRow row;
    row.t_ns = parse_i64(f[0], path, ln);
    check_monotone(prev, row.t_ns, path, ln);
    prev = row.t_ns;
    double vals[16];
    for (int i = 0; i < 16; ++i) vals[i] = parse_double(f[1 + i], path, ln);
    row.x.p = Vec3(vals[0], vals[1], vals[2]);
    const Vec4 q(vals[3], vals[4], vals[5], vals[6]);
    if (std::abs(q.norm() - 1.0) > 1e-6) {
      throw ParseError(path + ":" + std::to_string(ln) +
                       ": quaternion is not unit norm");
    }
    row.x.q = UnitQuaternion(q);
    row.x.v = Vec3(vals[7], vals[8], vals[9]);
    row.x.b_w = Vec3(vals[10], vals[11], vals[12]);
    row.x.b_a = Vec3(vals[13], vals[14], vals[15]);
    out.push_back(row);
  });
  return out;
}

void write_state_csv(const std::string& path,
                     const std::vector<StateRow>& rows) {
  std::string out =
      "#timestamp_ns,p_x,p_y,p_z,q_w,q_x,q_y,q_z,v_x,v_y,v_z,"
      "bw_x,bw_y,bw_z,ba_x,ba_y,ba_z\n";
  for (const StateRow& row : rows) {
    append_number(out, row.t_ns);
    const Vec4 q = row.x.q.coeffs();
    const double vals[16] = {row.x.p(0),  row.x.p(1),  row.x.p(2),  q(0),
                             q(1),        q(2),        q(3),        row.x.v(0),
                             row.x.v(1),  row.x.v(2),  row.x.b_w(0),
                             row.x.b_w(1), row.x.b_w(2), row.x.b_a(0),
                             row.x.b_a(1), row.x.b_a(2)};
    for (double v : vals) {
      out += ',';
      append_number(out, v);
    }
    out += '\n';
  }
  write_file(path, out);
}

std::pair<WorldMap, std::vector<FeatureFrame>> read_feature_frames(
    const std::string& path_map, const std::string& path_obs) {
  WorldMap map;
  std::unordered_map<std::int64_t, Vec3> by_id;
  for_each_csv_row(path_map, 4,
                   [&](const std::vector<std::string>& f, size_t ln) {
                     WorldFeature feat;
                     feat.id = parse_i64(f[0], path_map, ln);
                     for (int i = 0; i < 3; ++i) {
                       feat.pos(i) = parse_double(f[1 + i], path_map, ln);
                     }
                     if (!by_id.emplace(feat.id, feat.pos).second) {
                       throw ParseError(path_map + ":" + std::to_string(ln) +
                                        ": duplicate feature id");
                     }
                     map.features.push_back(feat);
                   });

  std::vector<FeatureFrame> frames;
  for_each_csv_row(path_obs, 5,
                   [&](const std::vector<std::string>& f, size_t ln) {
                     const std::int64_t t = parse_i64(f[0], path_obs, ln);
                     const std::int64_t id = parse_i64(f[1], path_obs, ln);
                     Vec3 fb;
                     for (int i = 0; i < 3; ++i) {
                       fb(i) = parse_double(f[2 + i], path_obs, ln);
                     }
                     const auto it = by_id.find(id);
                     if (it == by_id.end()) {
                       throw UnknownFeatureId(
                           path_obs + ":" + std::to_string(ln) +
                           ": feature id " + std::to_string(id) +
                           " not in map");
                     }
                     if (frames.empty() || t != frames.back().t_ns) {
                       const std::int64_t last =
                           frames.empty()
                               ? std::numeric_limits<std::int64_t>::min()
                               : frames.back().t_ns;
                       if (t <= last) {
                         throw NonMonotoneTime(path_obs + ":" +
                                               std::to_string(ln) +
                                               ": timestamp goes backwards");
                       }
                       frames.emplace_back();
                       frames.back().t_ns = t;
                     }
                     frames.back().ids.push_back(id);
                     frames.back().f_w.push_back(it->second);
                     frames.back().f_b.push_back(fb);
                   });
  return {std::move(map), std::move(frames)};
}

void write_feature_map(const std::string& path, const WorldMap& map) {
  std::string out = "#id,x,y,z\n";
  for (const WorldFeature& f : map.features) {
    append_number(out, f.id);
    for (int i = 0; i < 3; ++i) {
      out += ',';
      append_number(out, f.pos(i));
    }
    out += '\n';
  }
  write_file(path, out);
}

void write_feature_obs(const std::string& path,
                       const std::vector<FeatureFrame>& frames) {
  std::string out = "#timestamp_ns,id,fb_x,fb_y,fb_z\n";
  for (const FeatureFrame& frame : frames) {
    for (size_t i = 0; i < frame.size(); ++i) {
      append_number(out, frame.t_ns);
      out += ',';
      append_number(out, frame.ids[i]);
      for (int k = 0; k < 3; ++k) {
        out += ',';
        append_number(out, frame.f_b[i](k));
      }
      out += '\n';
    }
  }
  write_file(path, out);
}

void write_meta_json(const std::string& path, const DatasetMeta& meta) {
  json j;
  j["imu_rate"] = meta.imu_rate;
  j["cam_rate"] = meta.cam_rate;
  j["duration"] = meta.duration;
  j["seed"] = meta.seed;
  j["frames_note"] = meta.frames_note;
  write_file(path, j.dump(2) + "\n");
}

DatasetMeta read_meta_json(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  DatasetMeta meta;
  meta.imu_rate = j.value("imu_rate", 0.0);
  meta.cam_rate = j.value("cam_rate", 0.0);
  meta.duration = j.value("duration", 0.0);
  meta.seed = j.value("seed", std::uint64_t{0});
  meta.frames_note = j.value("frames_note", std::string{});
  return meta;
}

void write_diagnostics_csv(const std::string& path,
                           const std::vector<StepDiagnostics>& diag) {
  std::string out =
      "#timestamp_ns,updated,innovation_norm,trace_p,cond_estimate,"
      "mean_fallback,step_us\n";
  for (const StepDiagnostics& d : diag) {
    append_number(out, d.t_ns);
    out += d.updated ? ",1," : ",0,";
    append_number(out, d.innovation_norm);
    out += ',';
    append_number(out, d.trace_p);
    out += ',';
    append_number(out, d.cond_estimate);
    out += d.mean_fallback ? ",1," : ",0,";
    append_number(out, d.step_us);
    out += '\n';
  }
  write_file(path, out);
}

std::vector<StepDiagnostics> read_diagnostics_csv(const std::string& path) {
  std::vector<StepDiagnostics> out;
  for_each_csv_row(path, 7, [&](const std::vector<std::string>& f, size_t ln) {
    StepDiagnostics d;
    d.t_ns = parse_i64(f[0], path, ln);
    d.updated = parse_i64(f[1], path, ln) != 0;
    d.innovation_norm = parse_double(f[2], path, ln);
    d.trace_p = parse_double(f[3], path, ln);
    d.cond_estimate = parse_double(f[4], path, ln);
    d.mean_fallback = parse_i64(f[5], path, ln) != 0;
    d.step_us = parse_double(f[6], path, ln);
    out.push_back(d);
  });
  return out;
}

Dataset read_dataset(const std::string& dir) {
  Dataset ds;
  ds.imu = read_imu_csv(dir + "/imu.csv");
  auto [map, frames] =
      read_feature_frames(dir + "/features_map.csv", dir + "/features_obs.csv");
  ds.frames = std::move(frames);
  ds.meta = read_meta_json(dir + "/meta.json");
  if (std::ifstream(dir + "/truth.csv").good()) {
    ds.truth = read_state_csv(dir + "/truth.csv");
  }
  return ds;
}

Metrics compute_metrics(const std::vector<StateRow>& estimates,
                        const std::vector<StateRow>& truth) {
  if (estimates.size() != truth.size()) {
    throw MisalignedSeries("compute_metrics: series lengths differ");
  }
  if (estimates.empty()) {
    throw MisalignedSeries("compute_metrics: empty series");
  }
  Metrics m;
  m.rows.reserve(estimates.size());
  for (size_t i = 0; i < estimates.size(); ++i) {
    if (estimates[i].t_ns != truth[i].t_ns) {
      throw MisalignedSeries("compute_metrics: timestamp mismatch at row " +
                             std::to_string(i));
    }
    ErrorRow row;
    row.t_ns = truth[i].t_ns;
    row.r_e = ominus(truth[i].x.q, estimates[i].x.q);
    row.p_e = truth[i].x.p - estimates[i].x.p;
    row.v_e = truth[i].x.v - estimates[i].x.v;
    row.e = row.r_e.norm() + row.p_e.norm() + row.v_e.norm();
    m.rows.push_back(row);
  }
  m.steps = m.rows.size();

  double sum_sq = 0.0;
  for (const ErrorRow& row : m.rows) sum_sq += row.e * row.e;
  m.rmse = std::sqrt(sum_sq / static_cast<double>(m.rows.size()));

  const std::int64_t t_end = m.rows.back().t_ns;
  const std::int64_t window_start = t_end - 20'000'000'000;
  m.ssrmse_window_truncated = m.rows.front().t_ns > window_start;
  double ss_sum = 0.0;
  size_t ss_count = 0;
  for (const ErrorRow& row : m.rows) {
    if (row.t_ns >= window_start) {
      ss_sum += row.e * row.e;
      ++ss_count;
    }
  }
  m.ssrmse = std::sqrt(ss_sum / static_cast<double>(ss_count));
  return m;
}

void write_errors_csv(const std::string& path, const Metrics& metrics,
                      const std::vector<double>& trace_p) {
  if (trace_p.size() != metrics.rows.size()) {
    throw MisalignedSeries("write_errors_csv: trace series length mismatch");
  }
  std::string out =
      "#timestamp_ns,re_x,re_y,re_z,pe_x,pe_y,pe_z,ve_x,ve_y,ve_z,"
      "re_norm,pe_norm,ve_norm,trace_p\n";
  for (size_t i = 0; i < metrics.rows.size(); ++i) {
    const ErrorRow& r = metrics.rows[i];
    append_number(out, r.t_ns);
    const double vals[13] = {r.r_e(0),       r.r_e(1),       r.r_e(2),
                             r.p_e(0),       r.p_e(1),       r.p_e(2),
                             r.v_e(0),       r.v_e(1),       r.v_e(2),
                             r.r_e.norm(),   r.p_e.norm(),   r.v_e.norm(),
                             trace_p[i]};
    for (double v : vals) {
      out += ',';
      append_number(out, v);
    }
    out += '\n';
  }
  write_file(path, out);
}

void write_metrics_json(const std::string& path, const Metrics& metrics) {
  json j;
  j["rmse"] = metrics.rmse;
  j["ssrmse"] = metrics.ssrmse;
  j["steps"] = metrics.steps;
  j["ssrmse_window_truncated"] = metrics.ssrmse_window_truncated;
  write_file(path, j.dump(2) + "\n");
}

void write_summary_json(const std::string& path, const Metrics& metrics,
                        double runtime_ms) {
  json j;
  j["rmse"] = metrics.rmse;
  j["ssrmse"] = metrics.ssrmse;
  j["steps"] = metrics.steps;
  j["runtime_ms"] = runtime_ms;
  write_file(path, j.dump(2) + "\n");
}

// ---- key-value configuration ------------------------------------------------

namespace {

struct KeyValueFile {
  std::map<std::string, std::vector<std::string>> entries;
  std::string path;

  bool has(const std::string& key) const { return entries.count(key) > 0; }

  const std::vector<std::string>& tokens(const std::string& key,
                                         size_t count) const {
    const auto it = entries.find(key);
    if (it == entries.end()) {
      throw ParseError(path + ": missing required key '" + key + "'");
    }
    if (it->second.size() != count) {
      throw ParseError(path + ": key '" + key + "' expects " +
                       std::to_string(count) + " values");
    }
    return it->second;
  }

  double scalar(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return parse_double(tokens(key, 1)[0], path, 0);
  }

  Vec3 vec3(const std::string& key, const Vec3& fallback) const {
    if (!has(key)) return fallback;
    const auto& t = tokens(key, 3);
    return Vec3(parse_double(t[0], path, 0), parse_double(t[1], path, 0),
                parse_double(t[2], path, 0));
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = tokens(key, 1)[0];
    if (v == "1" || v == "true" || v == "on") return true;
    if (v == "0" || v == "false" || v == "off") return false;
    throw ParseError(path + ": key '" + key + "' expects a boolean");
  }

  std::string text(const std::string& key) const { return tokens(key, 1)[0]; }
};

KeyValueFile parse_key_value(const std::string& path) {
  KeyValueFile kv;
  kv.path = path;
  const std::string content = read_file(path);
  size_t start = 0;
  size_t line_no = 0;
  while (start < content.size()) {
    size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    ++line_no;
    std::string line = content.substr(start, end - start);
    start = end + 1;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const std::string_view t = trimmed(line);
    if (t.empty()) continue;
    const size_t eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected 'key = value'");
    }
    const std::string key{trimmed(t.substr(0, eq))};
    std::istringstream vals{std::string{t.substr(eq + 1)}};
    std::vector<std::string> toks;
    std::string tok;
    while (vals >> tok) toks.push_back(tok);
    if (key.empty() || toks.empty()) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": empty key or value");
    }
    if (!kv.entries.emplace(key, std::move(toks)).second) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

void reject_unknown_keys(const KeyValueFile& kv,
                         const std::unordered_set<std::string>& known) {
  for (const auto& [key, _] : kv.entries) {
    if (!known.count(key)) {
      throw ParseError(kv.path + ": unknown key '" + key + "'");
    }
  }
}

Mat3 diag3(const KeyValueFile& kv, const std::string& key) {
  return kv.vec3(key, Vec3::Zero()).asDiagonal();
}

}  // namespace

RunConfig read_run_config(const std::string& path) {
  const KeyValueFile kv = parse_key_value(path);
  reject_unknown_keys(
      kv, {"c_gyro_diag", "c_accel_diag", "c_gyro_bias_diag",
           "c_accel_bias_diag", "c_f", "gravity", "ut_lambda", "ut_alpha",
           "ut_beta", "init_mode", "init_q", "init_p", "init_v", "init_bw",
           "init_ba", "p0_diag", "init_att_offset", "init_pos_offset",
           "init_vel_offset", "eigenvalue_floor", "scale_bias_walk_with_dt",
           "dataset_dir", "out_dir"});

  RunConfig cfg;
  cfg.noise.c_gyro = diag3(kv, "c_gyro_diag");
  cfg.noise.c_accel = diag3(kv, "c_accel_diag");
  cfg.noise.c_gyro_bias = diag3(kv, "c_gyro_bias_diag");
  cfg.noise.c_accel_bias = diag3(kv, "c_accel_bias_diag");
  cfg.noise.c_f = kv.scalar("c_f", cfg.noise.c_f);
  cfg.noise.gravity = kv.vec3("gravity", cfg.noise.gravity);
  cfg.ut_lambda = kv.scalar("ut_lambda", cfg.ut_lambda);
  cfg.ut_alpha = kv.scalar("ut_alpha", cfg.ut_alpha);
  cfg.ut_beta = kv.scalar("ut_beta", cfg.ut_beta);

  if (kv.has("init_mode")) {
    const std::string mode = kv.text("init_mode");
    if (mode == "explicit") {
      cfg.init_mode = InitMode::kExplicit;
    } else if (mode == "truth") {
      cfg.init_mode = InitMode::kTruth;
    } else {
      throw ParseError(path + ": init_mode must be 'explicit' or 'truth'");
    }
  }
  if (kv.has("init_q")) {
    const auto& t = kv.tokens("init_q", 4);
    const Vec4 q(parse_double(t[0], path, 0), parse_double(t[1], path, 0),
                 parse_double(t[2], path, 0), parse_double(t[3], path, 0));
    if (std::abs(q.norm() - 1.0) > 1e-6) {
      throw ParseError(path + ": init_q must be unit norm");
    }
    cfg.x0.q = UnitQuaternion(q);
  }
  cfg.x0.p = kv.vec3("init_p", cfg.x0.p);
  cfg.x0.v = kv.vec3("init_v", cfg.x0.v);
  cfg.x0.b_w = kv.vec3("init_bw", cfg.x0.b_w);
  cfg.x0.b_a = kv.vec3("init_ba", cfg.x0.b_a);
  if (kv.has("p0_diag")) {
    const auto& t = kv.tokens("p0_diag", 15);
    for (int i = 0; i < 15; ++i) {
      cfg.p0_diag(i) = parse_double(t[i], path, 0);
    }
  }
  cfg.init_att_offset = kv.vec3("init_att_offset", cfg.init_att_offset);
  cfg.init_pos_offset = kv.vec3("init_pos_offset", cfg.init_pos_offset);
  cfg.init_vel_offset = kv.vec3("init_vel_offset", cfg.init_vel_offset);
  cfg.eigenvalue_floor = kv.flag("eigenvalue_floor", cfg.eigenvalue_floor);
  cfg.scale_bias_walk_with_dt =
      kv.flag("scale_bias_walk_with_dt", cfg.scale_bias_walk_with_dt);
  if (kv.has("dataset_dir")) cfg.dataset_dir = kv.text("dataset_dir");
  if (kv.has("out_dir")) cfg.out_dir = kv.text("out_dir");
  return cfg;
}

SimScenario read_sim_scenario(const std::string& path) {
  const KeyValueFile kv = parse_key_value(path);
  reject_unknown_keys(
      kv, {"kind", "amplitude", "angular_rate", "yaw_rate", "duration",
           "imu_rate", "cam_rate", "seed", "world_features", "world_box",
           "visibility_radius", "max_per_frame", "min_per_frame",
           "c_gyro_diag", "c_accel_diag", "c_gyro_bias_diag",
           "c_accel_bias_diag", "c_f", "gravity", "b0_gyro", "b0_accel"});

  SimScenario sc;
  sc.noise.c_f = 0.0;  // simulator default: noise-free observations
  if (kv.has("kind")) {
    const std::string kind = kv.text("kind");
    if (kind == "hover") {
      sc.traj.kind = TrajectoryKind::kHover;
    } else if (kind == "circle") {
      sc.traj.kind = TrajectoryKind::kCircle;
    } else if (kind == "lissajous") {
      sc.traj.kind = TrajectoryKind::kLissajous;
    } else {
      throw ParseError(path + ": kind must be hover, circle, or lissajous");
    }
  }
  sc.traj.amplitude = kv.vec3("amplitude", sc.traj.amplitude);
  sc.traj.angular_rate = kv.scalar("angular_rate", sc.traj.angular_rate);
  sc.traj.yaw_rate = kv.scalar("yaw_rate", sc.traj.yaw_rate);
  sc.traj.duration = kv.scalar("duration", sc.traj.duration);
  sc.traj.imu_rate = kv.scalar("imu_rate", sc.traj.imu_rate);
  sc.traj.cam_rate = kv.scalar("cam_rate", sc.traj.cam_rate);
  if (kv.has("seed")) {
    sc.traj.seed = static_cast<std::uint64_t>(
        parse_i64(kv.tokens("seed", 1)[0], path, 0));
  }
  sc.world_features = static_cast<int>(
      kv.scalar("world_features", sc.world_features));
  sc.world_box = kv.vec3("world_box", sc.world_box);
  sc.features.visibility_radius =
      kv.scalar("visibility_radius", sc.features.visibility_radius);
  sc.features.max_per_frame = static_cast<int>(
      kv.scalar("max_per_frame", sc.features.max_per_frame));
  sc.features.min_per_frame = static_cast<int>(
      kv.scalar("min_per_frame", sc.features.min_per_frame));
  sc.noise.c_gyro = diag3(kv, "c_gyro_diag");
  sc.noise.c_accel = diag3(kv, "c_accel_diag");
  sc.noise.c_gyro_bias = diag3(kv, "c_gyro_bias_diag");
  sc.noise.c_accel_bias = diag3(kv, "c_accel_bias_diag");
  if (kv.has("c_f")) sc.noise.c_f = kv.scalar("c_f", sc.noise.c_f);
  sc.noise.gravity = kv.vec3("gravity", sc.noise.gravity);
  sc.b0_gyro = kv.vec3("b0_gyro", sc.b0_gyro);
  sc.b0_accel = kv.vec3("b0_accel", sc.b0_accel);
  return sc;
}

}  // namespace navkf
