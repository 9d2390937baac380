#include "sfqgate/checkpoint.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "sfqgate/error.hpp"

namespace sfq {

namespace {

using nlohmann::json;

constexpr int kCheckpointVersion = 1;

json matrix_json(const Matrix4c& m) {
  json re = json::array(), im = json::array();
  for (int i = 0; i < 4; ++i) {
    json r = json::array(), c = json::array();
    for (int j = 0; j < 4; ++j) {
      r.push_back(m(i, j).real());
      c.push_back(m(i, j).imag());
    }
    re.push_back(r);
    im.push_back(c);
  }
  return {{"re", re}, {"im", im}};
}

Matrix4c matrix_from_json(const json& j) {
  Matrix4c m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      m(r, c) = Complex(j.at("re").at(r).at(c).get<double>(), j.at("im").at(r).at(c).get<double>());
  return m;
}

json report_json(const GateReport& r) {
  return {{"logical", matrix_json(r.logical)}, {"fidelity_raw", r.fidelity_raw},
          {"fidelity", r.fidelity},            {"phi_z1", r.phi_z1},
          {"phi_z2", r.phi_z2},                {"leakage", r.leakage},
          {"z_compensated", r.z_compensated},  {"wall_seconds", r.wall_seconds}};
}

GateReport report_from(const json& j) {
  GateReport r;
  r.logical = matrix_from_json(j.at("logical"));
  r.fidelity_raw = j.at("fidelity_raw");
  r.fidelity = j.at("fidelity");
  r.phi_z1 = j.at("phi_z1");
  r.phi_z2 = j.at("phi_z2");
  r.leakage = j.at("leakage");
  r.z_compensated = j.at("z_compensated");
  r.wall_seconds = j.at("wall_seconds");
  return r;
}

json schedule_json(const ControlSchedule& s) {
  json ex = json::array();
  for (const auto& e : s.excursions) ex.push_back({e.start, e.end});
  return {{"clock_freq", s.clock_freq}, {"duration", s.duration},
          {"kick_angle", s.kick_angle}, {"amplitudes_q1", s.amplitudes_q1},
          {"amplitudes_q2", s.amplitudes_q2}, {"excursions", ex},
          {"n_ramp", s.n_ramp},         {"flux_off", s.flux_off},
          {"flux_on", s.flux_on},
          {"mode", s.mode == ScheduleMode::Discrete ? "discrete" : "relaxed"}};
}

ControlSchedule schedule_from(const json& j) {
  ControlSchedule s;
  s.clock_freq = j.at("clock_freq");
  s.duration = j.at("duration");
  s.kick_angle = j.at("kick_angle");
  s.amplitudes_q1 = j.at("amplitudes_q1").get<std::vector<double>>();
  s.amplitudes_q2 = j.at("amplitudes_q2").get<std::vector<double>>();
  for (const auto& e : j.at("excursions")) s.excursions.push_back({e.at(0), e.at(1)});
  s.n_ramp = j.at("n_ramp");
  s.flux_off = j.at("flux_off");
  s.flux_on = j.at("flux_on");
  s.mode = j.at("mode") == "discrete" ? ScheduleMode::Discrete : ScheduleMode::Relaxed;
  return s;
}

}  // namespace

std::string run_to_json(const OptimizationRun& run) {
  const auto& t = run.schedule_template;
  const auto& p = run.penalty;
  json j;
  j["version"] = kCheckpointVersion;
  j["target_id"] = run.target_id;
  j["target"] = matrix_json(run.target);
  j["template"] = {{"clock_freq", t.clock_freq}, {"duration", t.duration},
                   {"kick_angle", t.kick_angle}, {"n_ramp", t.n_ramp},
                   {"flux_off", t.flux_off},     {"flux_on", t.flux_on},
                   {"excursion_count", t.excursion_count}};
  j["penalty"] = {{"gamma", p.gamma},   {"mu", p.mu},
                  {"factor", p.factor}, {"updates_per_stage", p.updates_per_stage},
                  {"stages", p.stages}};
  j["seed"] = run.seed;
  j["completed_stages"] = run.completed_stages;
  j["cost_trajectory"] = run.cost_trajectory;
  j["params"] = {{"ticks", run.params.ticks},
                 {"excursion_count", run.params.excursion_count},
                 {"theta", std::vector<double>(run.params.theta.data(),
                                               run.params.theta.data() + run.params.theta.size())}};
  j["log"] = run.log;
  j["finished"] = run.finished;
  j["aborted"] = run.aborted;
  j["relaxed_fidelity"] = run.relaxed_fidelity;
  if (run.finished) {
    j["rounded"] = schedule_json(run.rounded);
    j["report"] = report_json(run.report);
  }
  return j.dump(1);
}

OptimizationRun run_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    require(j.at("version") == kCheckpointVersion, ErrorClass::Format,
            "unsupported checkpoint version");
    OptimizationRun run;
    run.target_id = j.at("target_id");
    run.target = matrix_from_json(j.at("target"));
    const auto& t = j.at("template");
    auto& tm = run.schedule_template;
    tm.clock_freq = t.at("clock_freq");
    tm.duration = t.at("duration");
    tm.kick_angle = t.at("kick_angle");
    tm.n_ramp = t.at("n_ramp");
    tm.flux_off = t.at("flux_off");
    tm.flux_on = t.at("flux_on");
    tm.excursion_count = t.at("excursion_count");
    const auto& p = j.at("penalty");
    run.penalty.gamma = p.at("gamma");
    run.penalty.mu = p.at("mu");
    run.penalty.factor = p.at("factor");
    run.penalty.updates_per_stage = p.at("updates_per_stage");
    run.penalty.stages = p.at("stages");
    run.seed = j.at("seed");
    run.completed_stages = j.at("completed_stages");
    run.cost_trajectory = j.at("cost_trajectory").get<std::vector<double>>();
    const auto& pr = j.at("params");
    run.params = RelaxedParams(pr.at("ticks").get<std::size_t>(), pr.at("excursion_count").get<int>());
    const auto theta = pr.at("theta").get<std::vector<double>>();
    require(static_cast<Eigen::Index>(theta.size()) == run.params.theta.size(),
            ErrorClass::Format, "checkpoint parameter count mismatch");
    for (std::size_t i = 0; i < theta.size(); ++i) run.params.theta(static_cast<Eigen::Index>(i)) = theta[i];
    run.log = j.at("log").get<std::vector<std::string>>();
    run.finished = j.at("finished");
    run.aborted = j.at("aborted");
    run.relaxed_fidelity = j.at("relaxed_fidelity");
    if (run.finished) {
      run.rounded = schedule_from(j.at("rounded"));
      run.report = report_from(j.at("report"));
    }
    return run;
  } catch (const json::exception& e) {
    fail(ErrorClass::Format, std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const OptimizationRun& run) {
  write_file_atomic(path, run_to_json(run));
}

OptimizationRun load_checkpoint(const std::string& path) {
  const Bytes b = read_file_bytes(path);
  return run_from_json(std::string(b.begin(), b.end()));
}

std::string report_to_json(const GateReport& report) { return report_json(report).dump(1); }

std::string calibration_to_json(const CalibrationResult& r) {
  json j = {{"phi_off", r.phi_off},       {"phi_on", r.phi_on},
            {"omega1", r.omega1},         {"omega2", r.omega2},
            {"splitting", r.splitting},   {"zz_idle", r.zz_idle},
            {"objective", r.objective},   {"evaluations", r.evaluations},
            {"f1_ghz", r.omega1 / kTwoPi}, {"f2_ghz", r.omega2 / kTwoPi}};
  return j.dump(1);
}

std::string sweep_csv(const std::vector<FsimSweepRow>& rows) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << "hold_ns,infidelity,theta,phi\n";
  os << std::setprecision(10);
  for (const auto& r : rows) os << r.hold << ',' << r.infidelity << ',' << r.theta << ',' << r.phi << '\n';
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  write_file_atomic(path, Bytes(contents.begin(), contents.end()));
}

void write_file_atomic(const std::string& path, const Bytes& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorClass::Io, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(contents.data()),
              static_cast<std::streamsize>(contents.size()));
    require(static_cast<bool>(out), ErrorClass::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  require(!ec, ErrorClass::Io, "cannot rename " + tmp.string() + ": " + ec.message());
}

Bytes read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorClass::Io, "cannot open " + path);
  return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace sfq
