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

#pragma once

// Scenario configuration, the pulse-sequence engine and power sweeps.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rabisim/analysis.hpp"
#include "rabisim/core_model.hpp"
#include "rabisim/meanfield.hpp"

namespace rabisim {

inline constexpr const char* kVersion = "0.1.0";

enum class SegmentKind { OpticalPump, Write, Delay, Probe, Read };

const char* to_string(SegmentKind kind) noexcept;

struct PulseSegment {
  SegmentKind kind = SegmentKind::Delay;
  double power_mw = 0.0;     // Write, Probe, Read
  double duration_us = 0.0;  // Write, Probe, Read
  double tau_us = 0.0;       // Delay
  double residual_m = 0.02;  // OpticalPump: leftover m-state population
};

enum class Engine { MeanField, Gaussian };

const char* to_string(Engine engine) noexcept;
Engine parse_engine(const std::string& name);

struct SweepConfig {
  std::vector<double> write_powers_mw;
  std::vector<double> probe_powers_mw;
  /// Intensity periods per write-sweep trace (window = periods * pi / Omega).
  double periods = 4.0;
  std::size_t samples_per_period = 50;
  std::size_t substeps = 4;  // RK4 steps per recorded sample in sweeps
  std::size_t workers = 1;
};

struct OutputConfig {
  std::string dir = "out";
  bool fit = true;
  bool efficiency = true;
  /// Gaussian noise added to recorded traces, as a fraction of the peak.
  double noise_fraction = 0.0;
};

struct ScenarioConfig {
  std::string scenario_id = "default";
  PhysicalParams params;
  ResonanceSpec resonance;
  double resonance_tolerance = 1e-6;
  DampingParams damping;
  IntegratorConfig integrator;
  double seed_amplitude = 1e-6;
  std::vector<PulseSegment> sequence;
  double power_calibration = 0.0;  // amplitude per sqrt(mW)
  Engine engine = Engine::MeanField;
  bool depletion = false;
  bool atom_cap = false;
  std::uint64_t seed = 1;
  SweepConfig sweep;
  OutputConfig output;

  /// Throws Error(Config) naming the violated rule.
  void validate() const;

  const PulseSegment* find(SegmentKind kind) const;
  PulseSegment* find(SegmentKind kind);
  /// The Probe or Read segment, whichever the sequence holds first.
  const PulseSegment* conversion_segment() const;
};

/// Defaults used for every key a document omits.
ScenarioConfig default_config();

/// Parses a JSON scenario document. Unknown keys, syntax errors (reported
/// with line and column) and invariant violations throw Error(Config).
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config_file(const std::string& path);

/// Fully resolved config as a JSON document with sorted keys.
std::string config_to_json(const ScenarioConfig& config);

cplx power_to_amplitude(double power_mw, double calibration);

struct NamedTrace {
  std::string name;
  Trace trace;
};

struct NamedFit {
  std::string name;
  FitResult fit;
};

struct NamedRegression {
  std::string name;
  RegressionResult regression;
};

struct SweepPoint {
  double power_mw = 0.0;
  double x = 0.0;  // sqrt(P) for write sweeps, P for probe sweeps
  double y = 0.0;  // fitted Omega or peak Stokes intensity
  double expected_omega = 0.0;
  double spin_excitations = 0.0;
  bool included = true;
  std::optional<FitResult> fit;
  std::string note;
};

struct OutputRecord {
  std::string scenario_id;
  std::string kind;  // simulate | sweep-write-power | sweep-probe-power | fit
  std::vector<NamedTrace> traces;
  std::vector<NamedFit> fits;
  std::vector<NamedRegression> regressions;
  std::vector<SweepPoint> sweep_points;
  std::optional<double> efficiency;
  std::optional<double> phase_difference;
  std::optional<double> omega_expected;
  std::optional<double> spin_excitations;
  std::vector<std::string> warnings;
  std::string config_json;
  std::string version = kVersion;
  std::string timestamp;
};

/// Runs the pulse sequence: OpticalPump resets the spin, Write builds it,
/// Delay decays it, Probe/Read converts and records traces.
OutputRecord run_scenario(const ScenarioConfig& config);

/// Write-power sweep: per point builds the spin, records a conversion trace
/// spanning sweep.periods intensity periods and fits Omega; then regresses
/// ln(Omega) on sqrt(P). Rows keep the input order.
OutputRecord sweep_write_power(const ScenarioConfig& config,
                               const std::vector<double>& powers_mw);

/// Probe-power sweep at fixed write power: peak converted intensity per
/// point, then the log-log slope over all points and over the top decade.
OutputRecord sweep_probe_power(const ScenarioConfig& config,
                               const std::vector<double>& powers_mw);

/// Fits the damped-Rabi model to one channel of an external trace.
OutputRecord fit_trace(const Trace& trace, Channel channel,
                       const std::string& name);

}  // namespace rabisim
