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

// Mean-field (c-number) dynamics of the trilinear Raman interaction
//
//   da_p/dt = -eta a_s S         - gamma_p a_p
//   da_s/dt =  eta a_p conj(S)   - gamma_stokes a_s
//   dS/dt   =  eta a_p conj(a_s) - gamma_spin S
//
// integrated with fixed-step classical RK4.

#include <cstddef>
#include <optional>
#include <vector>

#include "rabisim/core_model.hpp"

namespace rabisim {

struct FieldState {
  cplx a_p{0.0, 0.0};
  cplx a_s{0.0, 0.0};
  cplx s{0.0, 0.0};
  double t = 0.0;
};

struct FieldDerivative {
  cplx a_p{0.0, 0.0};
  cplx a_s{0.0, 0.0};
  cplx s{0.0, 0.0};
};

/// Amplitude decay rates in 1/us.
struct DampingParams {
  double gamma_p = 0.0;
  double gamma_stokes = 0.0;
  double gamma_spin = 0.0;
  double gamma_spin_read = 0.0;

  /// Throws Error(Config) when a rate is negative or the read-phase spin
  /// decay is slower than the probe-phase one.
  void validate() const;
};

struct IntegratorConfig {
  double dt = 1e-3;
  std::size_t max_steps = 10'000'000;
  std::size_t record_every = 1;

  void validate() const;
};

struct Trace {
  std::vector<double> times;
  std::vector<double> i_p;
  std::vector<double> i_s;
  std::vector<double> i_spin;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  void push(double t, double ip, double is, double ispin);
  void push(const FieldState& state);
};

/// Extra constraints on the equations of motion.
///
/// write_drive holds a_p at the given classical pump value (undepleted write
/// pump). With spin_backaction off the spin only decays, i.e. it acts as an
/// undepleted classical field. max_spin clamps |S| after every step.
struct Constraints {
  std::optional<cplx> write_drive;
  bool spin_backaction = true;
  std::optional<double> max_spin;
};

FieldDerivative derivatives(const FieldState& state, double eta,
                            const DampingParams& damping,
                            const Constraints& constraints = {});

struct IntegrationResult {
  Trace trace;
  FieldState final_state;
  std::size_t steps = 0;
  double step_size = 0.0;
  bool stiff_step_warning = false;  // dt * Omega_max > 0.1
};

/// Integrates over [t0, t0 + duration] with n = ceil(duration / dt) equal
/// steps. Throws Error(Diverged) naming the step index on non-finite values.
IntegrationResult integrate(const FieldState& state0, double duration,
                            double eta, const DampingParams& damping,
                            const IntegratorConfig& config,
                            const Constraints& constraints = {});

struct WriteOptions {
  double seed = 1e-6;        // initial Stokes amplitude
  cplx initial_spin{0.0, 0.0};
  bool depleted_pump = false;
  bool atom_cap = false;
};

struct WritePhaseResult {
  FieldState final_state;
  Trace trace;
  /// Spin amplitude relative to the seed: S(t_w) / seed.
  SpinWaveAmplitude spin;
  bool stiff_step_warning = false;
};

/// Write phase from a seeded Stokes field with the pump held at a_w unless
/// depleted_pump is set. With atom_cap, |S / seed|^2 never exceeds n_atoms.
WritePhaseResult run_write_phase(cplx a_w, double t_w,
                                 const PhysicalParams& params,
                                 const DampingParams& damping,
                                 const IntegratorConfig& config,
                                 const WriteOptions& options = {});

enum class ConversionMode { Probe, Read };

struct ConversionOptions {
  ConversionMode mode = ConversionMode::Probe;
  bool spin_backaction = true;
};

/// Conversion from (input_p, input_s) driven by spin0. Read mode uses
/// gamma_spin_read for the spin decay.
IntegrationResult run_conversion_phase(cplx input_p, cplx input_s,
                                       const SpinWaveAmplitude& spin0,
                                       double duration,
                                       const PhysicalParams& params,
                                       const DampingParams& damping,
                                       const IntegratorConfig& config,
                                       const ConversionOptions& options = {});

enum class ManleyRowePhase { Write, Convert };

/// Per-sample |Q(t) - Q(0)| / |Q(0)| where Q = i_p + i_s (convert) or
/// Q = i_s - i_spin (write). Falls back to the largest intensity in the
/// trace as the scale when Q(0) == 0.
std::vector<double> manley_rowe_drift(const Trace& trace,
                                      ManleyRowePhase phase);

double check_manley_rowe(const Trace& trace, ManleyRowePhase phase);

}  // namespace rabisim
