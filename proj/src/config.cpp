// Copyright 2026 The rabisim Authors
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

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "rabisim/error.hpp"
#include "rabisim/experiment.hpp"

namespace rabisim {

using nlohmann::json;

const char* to_string(SegmentKind kind) noexcept {
  switch (kind) {
    case SegmentKind::OpticalPump: return "optical_pump";
    case SegmentKind::Write: return "write";
    case SegmentKind::Delay: return "delay";
    case SegmentKind::Probe: return "probe";
    case SegmentKind::Read: return "read";
  }
  return "?";
}

const char* to_string(Engine engine) noexcept {
  return engine == Engine::Gaussian ? "gaussian" : "meanfield";
}

Engine parse_engine(const std::string& name) {
  if (name == "meanfield") return Engine::MeanField;
  if (name == "gaussian") return Engine::Gaussian;
  throw Error(ErrorCode::Config,
              "engine must be 'meanfield' or 'gaussian', got '" + name + "'");
}

cplx power_to_amplitude(double power_mw, double calibration) {
  if (power_mw < 0.0) {
    throw Error(ErrorCode::Domain, "power must be non-negative");
  }
  if (!(calibration > 0.0)) {
    throw Error(ErrorCode::Domain, "power calibration must be positive");
  }
  return cplx(calibration * std::sqrt(power_mw), 0.0);
}

ScenarioConfig default_config() {
  ScenarioConfig c;
  c.params = PhysicalParams::from_couplings(110.0, 110.0, 2.0 * std::numbers::pi * 1500.0,
                                            1e5);
  c.resonance.omega_p = 2369438000.0;
  c.resonance.omega_mg = 42943.57;
  c.resonance.omega_s = c.resonance.omega_p - c.resonance.omega_mg;
  c.resonance.read_detuning = 2.0 * std::numbers::pi * 1500.0;
  c.resonance_tolerance = 1e-3;
  c.damping = DampingParams{0.25, 0.25, 0.02, 0.3};
  c.integrator = IntegratorConfig{1e-3, 10'000'000, 5};
  c.seed_amplitude = 1e-6;
  c.power_calibration = 0.2093;
  c.sequence = {
      PulseSegment{SegmentKind::OpticalPump, 0.0, 0.0, 0.0, 0.02},
      PulseSegment{SegmentKind::Write, 48.0, 2.0, 0.0, 0.0},
      PulseSegment{SegmentKind::Delay, 0.0, 0.0, 0.1, 0.0},
      PulseSegment{SegmentKind::Probe, 1.0, 4.0, 0.0, 0.0},
  };
  c.sweep.write_powers_mw = {31.2, 41.3, 52.9, 65.9, 80.4, 96.3,
                             113.6, 132.3, 152.5, 174.1, 197.1, 221.6};
  c.sweep.probe_powers_mw = {0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 3.0};
  return c;
}

const PulseSegment* ScenarioConfig::find(SegmentKind kind) const {
  for (const auto& s : sequence) {
    if (s.kind == kind) return &s;
  }
  return nullptr;
}

PulseSegment* ScenarioConfig::find(SegmentKind kind) {
  for (auto& s : sequence) {
    if (s.kind == kind) return &s;
  }
  return nullptr;
}

const PulseSegment* ScenarioConfig::conversion_segment() const {
  for (const auto& s : sequence) {
    if (s.kind == SegmentKind::Probe || s.kind == SegmentKind::Read) return &s;
  }
  return nullptr;
}

namespace {

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorCode::Config, msg);
}

}  // namespace

void ScenarioConfig::validate() const {
  if (params.delta == 0.0) config_error("params.delta must be nonzero");
  if (!(params.n_atoms > 0.0)) config_error("params.n_atoms must be > 0");
  if (!(power_calibration > 0.0)) {
    config_error("params.power_calibration must be > 0");
  }
  if (resonance_tolerance < 0.0) {
    config_error("resonance.tolerance must be >= 0");
  }
  if (!validate_resonance(resonance, resonance_tolerance)) {
    config_error("two-photon resonance violated: |omega_p - omega_s - omega_mg| > tolerance");
  }
  damping.validate();
  integrator.validate();
  if (!(seed_amplitude > 0.0)) config_error("integrator.seed_amplitude must be > 0");

  int writes = 0;
  int conversions = 0;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const auto& s = sequence[i];
    const std::string where = "sequence[" + std::to_string(i) + "]";
    if (s.power_mw < 0.0 || s.duration_us < 0.0 || s.tau_us < 0.0) {
      config_error(where + ": power, duration and tau must be >= 0");
    }
    switch (s.kind) {
      case SegmentKind::OpticalPump:
        if (i != 0) config_error(where + ": optical_pump must come first");
        if (s.residual_m < 0.0 || s.residual_m >= 1.0) {
          config_error(where + ": residual_m must lie in [0, 1)");
        }
        break;
      case SegmentKind::Write:
        if (++writes > 1) config_error(where + ": only one write segment allowed");
        if (conversions > 0) {
          config_error(where + ": write must precede probe/read");
        }
        if (!(s.duration_us > 0.0)) config_error(where + ": write duration must be > 0");
        break;
      case SegmentKind::Delay:
        break;
      case SegmentKind::Probe:
      case SegmentKind::Read:
        if (++conversions > 1) {
          config_error(where + ": only one probe/read segment allowed");
        }
        if (!(s.duration_us > 0.0)) {
          config_error(where + ": conversion duration must be > 0");
        }
        break;
    }
  }
  if (!(sweep.periods > 0.0)) config_error("sweep.periods must be > 0");
  if (sweep.samples_per_period < 8) config_error("sweep.samples_per_period must be >= 8");
  if (sweep.substeps < 1) config_error("sweep.substeps must be >= 1");
  if (sweep.workers < 1) config_error("sweep.workers must be >= 1");
  for (double p : sweep.write_powers_mw) {
    if (!(p > 0.0)) config_error("sweep.write_powers_mw entries must be > 0");
  }
  for (double p : sweep.probe_powers_mw) {
    if (!(p > 0.0)) config_error("sweep.probe_powers_mw entries must be > 0");
  }
  if (output.noise_fraction < 0.0) config_error("output.noise_fraction must be >= 0");
}

namespace {

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      config_error("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

double get_number(const json& obj, const char* key, const std::string& where,
                   double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) config_error(where + "." + key + " must be a number");
  return v.get<double>();
}

std::size_t get_count(const json& obj, const char* key, const std::string& where,
                      std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned()) {
    config_error(where + "." + key + " must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

bool get_bool(const json& obj, const char* key, const std::string& where,
              bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) config_error(where + "." + key + " must be true or false");
  return v.get<bool>();
}

std::string get_string(const json& obj, const char* key, const std::string& where,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) config_error(where + "." + key + " must be a string");
  return v.get<std::string>();
}

std::vector<double> get_list(const json& obj, const char* key,
                             const std::string& where,
                             const std::vector<double>& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_array()) config_error(where + "." + key + " must be a list of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) config_error(where + "." + key + " must be a list of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

SegmentKind parse_kind(const std::string& s, const std::string& where) {
  if (s == "optical_pump") return SegmentKind::OpticalPump;
  if (s == "write") return SegmentKind::Write;
  if (s == "delay") return SegmentKind::Delay;
  if (s == "probe") return SegmentKind::Probe;
  if (s == "read") return SegmentKind::Read;
  config_error(where + ".kind: unknown segment kind '" + s + "'");
}

PulseSegment parse_segment(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    config_error(where + " needs a string 'kind'");
  }
  PulseSegment s;
  s.kind = parse_kind(j.at("kind").get<std::string>(), where);
  switch (s.kind) {
    case SegmentKind::OpticalPump:
      check_keys(j, where, {"kind", "residual_m"});
      s.residual_m = get_number(j, "residual_m", where, 0.02);
      break;
    case SegmentKind::Delay:
      check_keys(j, where, {"kind", "tau_us"});
      s.tau_us = get_number(j, "tau_us", where, 0.1);
      break;
    default:
      check_keys(j, where, {"kind", "power_mw", "duration_us"});
      s.power_mw = get_number(j, "power_mw", where, s.kind == SegmentKind::Write ? 48.0 : 1.0);
      s.duration_us = get_number(j, "duration_us", where, s.kind == SegmentKind::Write ? 2.0 : 4.0);
      s.residual_m = 0.0;
      break;
  }
  return s;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  json doc;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    doc = json::object();
  } else {
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      // nlohmann reports "parse error at line L, column C: ..."
      std::string msg = e.what();
      const auto pos = msg.find("parse error");
      config_error("syntax error: " + (pos == std::string::npos ? msg : msg.substr(pos)));
    }
  }
  check_keys(doc, "",
             {"scenario_id", "engine", "depletion", "atom_cap", "seed", "params",
              "resonance", "damping", "integrator", "sequence", "sweep", "output"});

  ScenarioConfig c = default_config();
  c.scenario_id = get_string(doc, "scenario_id", "", c.scenario_id);
  if (c.scenario_id.empty() ||
      c.scenario_id.find_first_of("/\\ ") != std::string::npos) {
    config_error("scenario_id must be a non-empty name without spaces or slashes");
  }
  c.engine = parse_engine(get_string(doc, "engine", "", to_string(c.engine)));
  c.depletion = get_bool(doc, "depletion", "", c.depletion);
  c.atom_cap = get_bool(doc, "atom_cap", "", c.atom_cap);
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) config_error("seed must be a non-negative integer");
    c.seed = doc.at("seed").get<std::uint64_t>();
  }

  if (doc.contains("params")) {
    const auto& p = doc.at("params");
    check_keys(p, "params",
               {"g_eg", "g_em", "delta", "eta", "n_atoms", "power_calibration"});
    const double g_eg = get_number(p, "g_eg", "params", c.params.g_eg);
    const double g_em = get_number(p, "g_em", "params", c.params.g_em);
    const double delta = get_number(p, "delta", "params", c.params.delta);
    const double n_atoms = get_number(p, "n_atoms", "params", c.params.n_atoms);
    if (delta == 0.0) config_error("params.delta must be nonzero");
    if (!(n_atoms > 0.0)) config_error("params.n_atoms must be > 0");
    c.params = PhysicalParams::from_couplings(g_eg, g_em, delta, n_atoms);
    // eta is derived; an explicit value must agree with the couplings.
    if (p.contains("eta")) {
      const double eta = get_number(p, "eta", "params", c.params.eta);
      if (std::abs(eta - c.params.eta) > 1e-12 * std::abs(c.params.eta)) {
        config_error("params.eta must equal g_eg * g_em / delta");
      }
    }
    c.power_calibration = get_number(p, "power_calibration", "params", c.power_calibration);
  }
  if (doc.contains("resonance")) {
    const auto& r = doc.at("resonance");
    check_keys(r, "resonance", {"omega_p", "omega_s", "omega_mg", "read_detuning", "tolerance"});
    c.resonance.omega_p = get_number(r, "omega_p", "resonance", c.resonance.omega_p);
    c.resonance.omega_mg = get_number(r, "omega_mg", "resonance", c.resonance.omega_mg);
    c.resonance.omega_s = get_number(r, "omega_s", "resonance",
                                     c.resonance.omega_p - c.resonance.omega_mg);
    if (r.contains("read_detuning")) {
      c.resonance.read_detuning = get_number(r, "read_detuning", "resonance", 0.0);
    }
    c.resonance_tolerance = get_number(r, "tolerance", "resonance", c.resonance_tolerance);
  }
  if (doc.contains("damping")) {
    const auto& d = doc.at("damping");
    check_keys(d, "damping", {"gamma_p", "gamma_stokes", "gamma_spin", "gamma_spin_read"});
    c.damping.gamma_p = get_number(d, "gamma_p", "damping", c.damping.gamma_p);
    c.damping.gamma_stokes = get_number(d, "gamma_stokes", "damping", c.damping.gamma_stokes);
    c.damping.gamma_spin = get_number(d, "gamma_spin", "damping", c.damping.gamma_spin);
    c.damping.gamma_spin_read =
        get_number(d, "gamma_spin_read", "damping", c.damping.gamma_spin_read);
  }
  if (doc.contains("integrator")) {
    const auto& g = doc.at("integrator");
    check_keys(g, "integrator", {"dt", "max_steps", "record_every", "seed_amplitude"});
    c.integrator.dt = get_number(g, "dt", "integrator", c.integrator.dt);
    c.integrator.max_steps = get_count(g, "max_steps", "integrator", c.integrator.max_steps);
    c.integrator.record_every =
        get_count(g, "record_every", "integrator", c.integrator.record_every);
    c.seed_amplitude = get_number(g, "seed_amplitude", "integrator", c.seed_amplitude);
  }
  if (doc.contains("sequence")) {
    const auto& s = doc.at("sequence");
    if (!s.is_array()) config_error("sequence must be a list of segments");
    c.sequence.clear();
    for (std::size_t i = 0; i < s.size(); ++i) {
      c.sequence.push_back(parse_segment(s.at(i), "sequence[" + std::to_string(i) + "]"));
    }
  }
  if (doc.contains("sweep")) {
    const auto& w = doc.at("sweep");
    check_keys(w, "sweep", {"write_powers_mw", "probe_powers_mw", "periods",
                            "samples_per_period", "substeps", "workers"});
    c.sweep.write_powers_mw = get_list(w, "write_powers_mw", "sweep", c.sweep.write_powers_mw);
    c.sweep.probe_powers_mw = get_list(w, "probe_powers_mw", "sweep", c.sweep.probe_powers_mw);
    c.sweep.periods = get_number(w, "periods", "sweep", c.sweep.periods);
    c.sweep.samples_per_period =
        get_count(w, "samples_per_period", "sweep", c.sweep.samples_per_period);
    c.sweep.substeps = get_count(w, "substeps", "sweep", c.sweep.substeps);
    c.sweep.workers = get_count(w, "workers", "sweep", c.sweep.workers);
  }
  if (doc.contains("output")) {
    const auto& o = doc.at("output");
    check_keys(o, "output", {"dir", "fit", "efficiency", "noise_fraction"});
    c.output.dir = get_string(o, "dir", "output", c.output.dir);
    c.output.fit = get_bool(o, "fit", "output", c.output.fit);
    c.output.efficiency = get_bool(o, "efficiency", "output", c.output.efficiency);
    c.output.noise_fraction = get_number(o, "noise_fraction", "output", c.output.noise_fraction);
  }
  c.validate();
  return c;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ScenarioConfig& c) {
  json seq = json::array();
  for (const auto& s : c.sequence) {
    json j{{"kind", to_string(s.kind)}};
    switch (s.kind) {
      case SegmentKind::OpticalPump: j["residual_m"] = s.residual_m; break;
      case SegmentKind::Delay: j["tau_us"] = s.tau_us; break;
      default:
        j["power_mw"] = s.power_mw;
        j["duration_us"] = s.duration_us;
        break;
    }
    seq.push_back(std::move(j));
  }
  json resonance{{"omega_p", c.resonance.omega_p},
                 {"omega_s", c.resonance.omega_s},
                 {"omega_mg", c.resonance.omega_mg},
                 {"tolerance", c.resonance_tolerance}};
  if (c.resonance.read_detuning) resonance["read_detuning"] = *c.resonance.read_detuning;
  json doc{
      {"scenario_id", c.scenario_id},
      {"engine", to_string(c.engine)},
      {"depletion", c.depletion},
      {"atom_cap", c.atom_cap},
      {"seed", c.seed},
      {"params",
       {{"g_eg", c.params.g_eg},
        {"g_em", c.params.g_em},
        {"delta", c.params.delta},
        {"eta", c.params.eta},
        {"n_atoms", c.params.n_atoms},
        {"power_calibration", c.power_calibration}}},
      {"resonance", resonance},
      {"damping",
       {{"gamma_p", c.damping.gamma_p},
        {"gamma_stokes", c.damping.gamma_stokes},
        {"gamma_spin", c.damping.gamma_spin},
        {"gamma_spin_read", c.damping.gamma_spin_read}}},
      {"integrator",
       {{"dt", c.integrator.dt},
        {"max_steps", c.integrator.max_steps},
        {"record_every", c.integrator.record_every},
        {"seed_amplitude", c.seed_amplitude}}},
      {"sequence", seq},
      {"sweep",
       {{"write_powers_mw", c.sweep.write_powers_mw},
        {"probe_powers_mw", c.sweep.probe_powers_mw},
        {"periods", c.sweep.periods},
        {"samples_per_period", c.sweep.samples_per_period},
        {"substeps", c.sweep.substeps},
        {"workers", c.sweep.workers}}},
      {"output",
       {{"dir", c.output.dir},
        {"fit", c.output.fit},
        {"efficiency", c.output.efficiency},
        {"noise_fraction", c.output.noise_fraction}}},
  };
  return doc.dump(2);
}

}  // namespace rabisim
