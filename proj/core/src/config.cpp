#include "sfqgate/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "sfqgate/error.hpp"
#include "sfqgate/gates.hpp"

namespace sfq {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return std::string(line.substr(0, i));
  }
  return std::string(line);
}

double parse_factor(std::string_view t) {
  t = trim(t);
  if (t == "pi") return kPi;
  double v = 0.0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw std::invalid_argument("not a number: '" + std::string(t) + "'");
  return v;
}

struct Value {
  std::string_view text;

  double number() const {
    try {
      return parse_number_expression(text);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string("expected a number: ") + e.what());
    }
  }
  long integer() const {
    const double v = number();
    if (v != std::floor(v)) throw std::invalid_argument("expected an integer");
    return static_cast<long>(v);
  }
  bool boolean() const {
    if (text == "true") return true;
    if (text == "false") return false;
    throw std::invalid_argument("expected true or false");
  }
  std::string string() const {
    if (text.size() >= 2 && text.front() == '"' && text.back() == '"')
      return std::string(text.substr(1, text.size() - 2));
    throw std::invalid_argument("expected a quoted string");
  }
  std::vector<std::string_view> list() const {
    if (text.size() < 2 || text.front() != '[' || text.back() != ']')
      throw std::invalid_argument("expected a [ ... ] list");
    std::vector<std::string_view> items;
    std::string_view body = trim(text.substr(1, text.size() - 2));
    while (!body.empty()) {
      const auto comma = body.find(',');
      items.push_back(trim(body.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      body = trim(body.substr(comma + 1));
    }
    return items;
  }
  std::vector<double> numbers() const {
    std::vector<double> out;
    for (auto item : list()) out.push_back(Value{item}.number());
    return out;
  }
};

using Setter = std::function<void(RunConfig&, const Value&)>;

const std::map<std::string, Setter>& schema() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto real = [&t](const std::string& key, auto getter) {
      t[key] = [getter](RunConfig& c, const Value& v) { getter(c) = v.number(); };
    };
    auto integer = [&t](const std::string& key, auto getter) {
      t[key] = [getter](RunConfig& c, const Value& v) {
        getter(c) = static_cast<std::remove_reference_t<decltype(getter(c))>>(v.integer());
      };
    };
    auto flag = [&t](const std::string& key, auto getter) {
      t[key] = [getter](RunConfig& c, const Value& v) { getter(c) = v.boolean(); };
    };

    real("circuit.c1", [](RunConfig& c) -> double& { return c.circuit.c1; });
    real("circuit.c2", [](RunConfig& c) -> double& { return c.circuit.c2; });
    real("circuit.cc", [](RunConfig& c) -> double& { return c.circuit.cc; });
    real("circuit.c12", [](RunConfig& c) -> double& { return c.circuit.c12; });
    real("circuit.c1c", [](RunConfig& c) -> double& { return c.circuit.c1c; });
    real("circuit.c2c", [](RunConfig& c) -> double& { return c.circuit.c2c; });
    real("circuit.c1e", [](RunConfig& c) -> double& { return c.circuit.c1e; });
    real("circuit.c2e", [](RunConfig& c) -> double& { return c.circuit.c2e; });
    const char* modes[] = {"q1", "c", "q2"};
    for (int m = 0; m < 3; ++m) {
      const std::string p = std::string("circuit.i") + modes[m];
      real(p + "_left", [m](RunConfig& c) -> double& { return c.circuit.junctions[m].left_nA; });
      real(p + "_right", [m](RunConfig& c) -> double& { return c.circuit.junctions[m].right_nA; });
      const std::string f = std::string("circuit.phi") + modes[m];
      real(f + "_off", [m](RunConfig& c) -> double& { return c.circuit.phi_off[m]; });
      real(f + "_on", [m](RunConfig& c) -> double& { return c.circuit.phi_on[m]; });
    }

    integer("basis.levels", [](RunConfig& c) -> int& { return c.basis.levels; });
    integer("basis.n_max", [](RunConfig& c) -> int& { return c.basis.n_max; });

    real("calibration.qubit_freq", [](RunConfig& c) -> double& { return c.qubit_freq_ghz; });
    t["calibration.tolerance_khz"] = [](RunConfig& c, const Value& v) {
      const double w = angular_ghz(v.number() * 1e-6);
      c.calibration.tolerance = w * w;
    };
    integer("calibration.max_iterations",
            [](RunConfig& c) -> int& { return c.calibration.max_iterations; });
    integer("calibration.restarts", [](RunConfig& c) -> int& { return c.calibration.restarts; });
    real("calibration.initial_step", [](RunConfig& c) -> double& { return c.calibration.initial_step; });

    real("schedule.clock_freq", [](RunConfig& c) -> double& { return c.schedule.clock_freq; });
    real("schedule.duration", [](RunConfig& c) -> double& { return c.schedule.duration; });
    real("schedule.kick_angle", [](RunConfig& c) -> double& { return c.schedule.kick_angle; });
    integer("schedule.n_ramp", [](RunConfig& c) -> int& { return c.schedule.n_ramp; });
    integer("schedule.excursions", [](RunConfig& c) -> int& { return c.schedule.excursion_count; });
    real("schedule.flux_off", [](RunConfig& c) -> double& { return c.schedule.flux_off; });
    real("schedule.flux_on", [](RunConfig& c) -> double& { return c.schedule.flux_on; });

    real("optimizer.gamma", [](RunConfig& c) -> double& { return c.penalty.gamma; });
    real("optimizer.mu", [](RunConfig& c) -> double& { return c.penalty.mu; });
    real("optimizer.factor", [](RunConfig& c) -> double& { return c.penalty.factor; });
    integer("optimizer.updates_per_stage",
            [](RunConfig& c) -> int& { return c.penalty.updates_per_stage; });
    integer("optimizer.stages", [](RunConfig& c) -> int& { return c.penalty.stages; });
    integer("optimizer.memory", [](RunConfig& c) -> int& { return c.optimizer.memory; });
    real("optimizer.amplitude_epsilon",
         [](RunConfig& c) -> double& { return c.optimizer.amplitude_epsilon; });
    integer("optimizer.substeps_per_tick",
            [](RunConfig& c) -> int& { return c.optimizer.relaxation.substeps_per_tick; });
    flag("optimizer.z_compensate",
         [](RunConfig& c) -> bool& { return c.optimizer.relaxation.z_compensate; });
    integer("optimizer.seed", [](RunConfig& c) -> std::uint64_t& { return c.seed; });
    t["optimizer.target"] = [](RunConfig& c, const Value& v) { c.target = v.string(); };

    real("fsim.hold", [](RunConfig& c) -> double& { return c.fsim.hold; });
    integer("fsim.ramp_steps", [](RunConfig& c) -> int& { return c.fsim.ramp_steps; });
    real("fsim.step_duration", [](RunConfig& c) -> double& { return c.fsim.step_duration; });
    real("fsim.sweep_min", [](RunConfig& c) -> double& { return c.fsim.sweep_min; });
    real("fsim.sweep_max", [](RunConfig& c) -> double& { return c.fsim.sweep_max; });
    real("fsim.sweep_step", [](RunConfig& c) -> double& { return c.fsim.sweep_step; });

    t["decompose.target"] = [](RunConfig& c, const Value& v) { c.decompose.target = v.string(); };
    t["decompose.layer_durations"] = [](RunConfig& c, const Value& v) {
      const auto d = v.numbers();
      if (d.size() != 3) throw std::invalid_argument("expected three layer durations");
      std::copy(d.begin(), d.end(), c.decompose.layer_durations.begin());
    };
    integer("decompose.layer_stages", [](RunConfig& c) -> int& { return c.decompose.layer_stages; });

    t["search.clock_freqs"] = [](RunConfig& c, const Value& v) {
      const auto f = v.numbers();
      c.search.clocks.resize(f.size());
      for (std::size_t i = 0; i < f.size(); ++i) c.search.clocks[i].first = f[i];
    };
    t["search.kick_angles"] = [](RunConfig& c, const Value& v) {
      const auto a = v.numbers();
      if (a.size() != c.search.clocks.size())
        throw std::invalid_argument("kick_angles must pair with clock_freqs");
      for (std::size_t i = 0; i < a.size(); ++i) c.search.clocks[i].second = a[i];
    };
    t["search.durations"] = [](RunConfig& c, const Value& v) { c.search.durations = v.numbers(); };
    t["search.n_ramps"] = [](RunConfig& c, const Value& v) {
      c.search.n_ramps.clear();
      for (double d : v.numbers()) c.search.n_ramps.push_back(static_cast<int>(d));
    };
    t["search.excursion_counts"] = [](RunConfig& c, const Value& v) {
      c.search.excursion_counts.clear();
      for (double d : v.numbers()) c.search.excursion_counts.push_back(static_cast<int>(d));
    };
    integer("search.budget", [](RunConfig& c) -> int& { return c.budget; });
    integer("search.workers", [](RunConfig& c) -> unsigned& { return c.workers; });

    t["output.dir"] = [](RunConfig& c, const Value& v) { c.output_dir = v.string(); };
    return t;
  }();
  return table;
}

[[noreturn]] void parse_error(int line, const std::string& key, const std::string& msg) {
  std::ostringstream os;
  os << "line " << line;
  if (!key.empty()) os << ": key '" << key << "'";
  os << ": " << msg;
  fail(ErrorClass::Parse, os.str());
}

}  // namespace

double parse_number_expression(std::string_view text) {
  std::string_view t = trim(text);
  double sign = 1.0;
  if (!t.empty() && (t.front() == '-' || t.front() == '+')) {
    if (t.front() == '-') sign = -1.0;
    t = trim(t.substr(1));
  }
  if (t.empty()) throw std::invalid_argument("empty value");
  double value = 0.0;
  char op = 0;
  std::size_t pos = 0;
  while (true) {
    const auto next = t.find_first_of("*/", pos);
    const double f = parse_factor(t.substr(pos, next == std::string_view::npos ? t.npos : next - pos));
    if (op == 0) {
      value = f;
    } else if (op == '*') {
      value *= f;
    } else {
      if (f == 0.0) throw std::invalid_argument("division by zero");
      value /= f;
    }
    if (next == std::string_view::npos) break;
    op = t[next];
    pos = next + 1;
  }
  return sign * value;
}

void RunConfig::validate() const {
  circuit.validate();
  require(basis.levels >= 3 && basis.levels <= 12, ErrorClass::InvalidArgument,
          "basis.levels must lie in [3, 12]");
  require(basis.n_max >= 20, ErrorClass::InvalidArgument, "basis.n_max must be >= 20");
  require(qubit_freq_ghz > 0.0, ErrorClass::InvalidArgument, "calibration.qubit_freq must be > 0");
  require(calibration.tolerance > 0.0 && calibration.max_iterations >= 1 &&
              calibration.restarts >= 0 && calibration.initial_step > 0.0,
          ErrorClass::InvalidArgument, "calibration settings out of range");
  schedule.validate();
  penalty.validate();
  require(optimizer.memory >= 1, ErrorClass::InvalidArgument, "optimizer.memory must be >= 1");
  require(optimizer.amplitude_epsilon > 0.0 && optimizer.amplitude_epsilon < 0.5,
          ErrorClass::InvalidArgument, "optimizer.amplitude_epsilon must lie in (0, 0.5)");
  require(optimizer.relaxation.substeps_per_tick >= 1, ErrorClass::InvalidArgument,
          "optimizer.substeps_per_tick must be >= 1");
  target_gate(target);
  require(fsim.hold > 0.0 && fsim.ramp_steps >= 1 && fsim.step_duration > 0.0,
          ErrorClass::InvalidArgument, "fsim settings must be positive");
  require(fsim.sweep_min > 0.0 && fsim.sweep_max >= fsim.sweep_min && fsim.sweep_step > 0.0,
          ErrorClass::InvalidArgument, "fsim sweep range invalid");
  require(decompose.target == "cz" || decompose.target == "cnot", ErrorClass::InvalidArgument,
          "decompose.target must be cz or cnot");
  for (double d : decompose.layer_durations)
    require(d > 0.0, ErrorClass::InvalidArgument, "layer durations must be > 0");
  require(decompose.layer_stages >= 1, ErrorClass::InvalidArgument,
          "decompose.layer_stages must be >= 1");
  require(budget >= 1, ErrorClass::InvalidArgument, "search.budget must be >= 1");
  require(!search.clocks.empty() && !search.durations.empty() && !search.n_ramps.empty() &&
              !search.excursion_counts.empty(),
          ErrorClass::InvalidArgument, "search lists must be non-empty");
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  static const std::vector<std::string> sections{"circuit", "basis",     "calibration",
                                                 "schedule", "optimizer", "fsim",
                                                 "decompose", "search",   "output"};
  std::string section;
  std::map<std::string, int> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string cleaned = strip_comment(raw);
    const std::string_view l = trim(cleaned);
    if (l.empty()) continue;
    if (l.front() == '[') {
      if (l.back() != ']') parse_error(line, "", "unterminated section header");
      section = std::string(trim(l.substr(1, l.size() - 2)));
      if (std::find(sections.begin(), sections.end(), section) == sections.end())
        parse_error(line, "", "unknown section [" + section + "]");
      continue;
    }
    const auto eq = l.find('=');
    if (eq == std::string_view::npos) parse_error(line, "", "expected key = value");
    const std::string key(trim(l.substr(0, eq)));
    const std::string_view value = trim(l.substr(eq + 1));
    if (section.empty()) parse_error(line, key, "key outside of a section");
    const std::string full = section + "." + key;
    const auto it = schema().find(full);
    if (it == schema().end()) parse_error(line, full, "unknown key");
    if (seen.count(full)) parse_error(line, full, "duplicate key");
    seen[full] = line;
    try {
      it->second(config, Value{value});
    } catch (const std::invalid_argument& e) {
      parse_error(line, full, e.what());
    }
  }
  try {
    config.validate();
  } catch (const Error& e) {
    // Point at the line of the offending key when the message names one.
    int where = 0;
    std::string key;
    for (const auto& [k, l] : seen) {
      if (std::string(e.what()).find(k) != std::string::npos ||
          std::string(e.what()).find(k.substr(k.find('.') + 1)) != std::string::npos) {
        where = l;
        key = k;
        break;
      }
    }
    parse_error(where, key, e.what());
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorClass::Io, "cannot open config " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace sfq
