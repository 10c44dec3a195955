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

#include "rabisim/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rabisim/error.hpp"

namespace rabisim {

void DampingParams::validate() const {
  if (gamma_p < 0.0 || gamma_stokes < 0.0 || gamma_spin < 0.0 ||
      gamma_spin_read < 0.0) {
    throw Error(ErrorCode::Config, "damping rates must be >= 0");
  }
  if (gamma_spin_read < gamma_spin) {
    throw Error(ErrorCode::Config,
                "damping.gamma_spin_read must be >= damping.gamma_spin");
  }
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0)) throw Error(ErrorCode::Config, "integrator.dt must be > 0");
  if (max_steps < 1) {
    throw Error(ErrorCode::Config, "integrator.max_steps must be >= 1");
  }
  if (record_every < 1) {
    throw Error(ErrorCode::Config, "integrator.record_every must be >= 1");
  }
}

void Trace::push(double t, double ip, double is, double ispin) {
  times.push_back(t);
  i_p.push_back(ip);
  i_s.push_back(is);
  i_spin.push_back(ispin);
}

void Trace::push(const FieldState& state) {
  push(state.t, std::norm(state.a_p), std::norm(state.a_s),
       std::norm(state.s));
}

FieldDerivative derivatives(const FieldState& state, double eta,
                            const DampingParams& damping,
                            const Constraints& constraints) {
  const cplx a_p = constraints.write_drive ? *constraints.write_drive
                                           : state.a_p;
  FieldDerivative d;
  d.a_p = constraints.write_drive
              ? cplx(0.0, 0.0)
              : -eta * state.a_s * state.s - damping.gamma_p * a_p;
  d.a_s = eta * a_p * std::conj(state.s) - damping.gamma_stokes * state.a_s;
  d.s = -damping.gamma_spin * state.s;
  if (constraints.spin_backaction) {
    d.s += eta * a_p * std::conj(state.a_s);
  }
  return d;
}

namespace {

FieldState advance(const FieldState& y, const FieldDerivative& k, double h) {
  return FieldState{y.a_p + h * k.a_p, y.a_s + h * k.a_s, y.s + h * k.s,
                    y.t + h};
}

bool finite(const FieldState& y) {
  return std::isfinite(y.a_p.real()) && std::isfinite(y.a_p.imag()) &&
         std::isfinite(y.a_s.real()) && std::isfinite(y.a_s.imag()) &&
         std::isfinite(y.s.real()) && std::isfinite(y.s.imag());
}

void apply_constraints(FieldState& y, const Constraints& c) {
  if (c.write_drive) y.a_p = *c.write_drive;
  if (c.max_spin) {
    const double mag = std::abs(y.s);
    if (mag > *c.max_spin) y.s *= *c.max_spin / mag;
  }
}

}  // namespace

IntegrationResult integrate(const FieldState& state0, double duration,
                            double eta, const DampingParams& damping,
                            const IntegratorConfig& config,
                            const Constraints& constraints) {
  if (!(duration > 0.0)) {
    throw Error(ErrorCode::Domain, "integration duration must be > 0");
  }
  config.validate();
  const double ratio = duration / config.dt;
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(ratio - 1e-9)));
  if (n > config.max_steps) {
    throw Error(ErrorCode::Config,
                "integration needs " + std::to_string(n) +
                    " steps, above integrator.max_steps");
  }
  const double h = duration / static_cast<double>(n);
  const double t0 = state0.t;

  IntegrationResult out;
  out.steps = n;
  out.step_size = h;

  FieldState y = state0;
  apply_constraints(y, constraints);
  const double amplitude_scale = std::sqrt(std::norm(y.a_p) + std::norm(y.a_s) +
                                           std::norm(y.s));
  out.stiff_step_warning = std::abs(eta) * amplitude_scale * h > 0.1;

  out.trace.times.reserve(n / config.record_every + 2);
  out.trace.push(y);
  for (std::size_t i = 1; i <= n; ++i) {
    const auto k1 = derivatives(y, eta, damping, constraints);
    const auto k2 = derivatives(advance(y, k1, 0.5 * h), eta, damping, constraints);
    const auto k3 = derivatives(advance(y, k2, 0.5 * h), eta, damping, constraints);
    const auto k4 = derivatives(advance(y, k3, h), eta, damping, constraints);
    y.a_p += h / 6.0 * (k1.a_p + 2.0 * k2.a_p + 2.0 * k3.a_p + k4.a_p);
    y.a_s += h / 6.0 * (k1.a_s + 2.0 * k2.a_s + 2.0 * k3.a_s + k4.a_s);
    y.s += h / 6.0 * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s);
    y.t = t0 + static_cast<double>(i) * h;
    apply_constraints(y, constraints);
    if (!finite(y)) {
      throw Error(ErrorCode::Diverged,
                  "integration diverged at step " + std::to_string(i));
    }
    if (i % config.record_every == 0 || i == n) out.trace.push(y);
  }
  out.final_state = y;
  return out;
}

WritePhaseResult run_write_phase(cplx a_w, double t_w,
                                 const PhysicalParams& params,
                                 const DampingParams& damping,
                                 const IntegratorConfig& config,
                                 const WriteOptions& options) {
  if (!(t_w > 0.0)) {
    throw Error(ErrorCode::Domain, "write duration must be > 0");
  }
  if (!(options.seed > 0.0)) {
    throw Error(ErrorCode::Domain, "write seed amplitude must be > 0");
  }
  FieldState start;
  start.a_p = a_w;
  start.a_s = cplx(options.seed, 0.0);
  start.s = options.initial_spin * options.seed;

  Constraints c;
  if (!options.depleted_pump) c.write_drive = a_w;
  if (options.atom_cap) c.max_spin = options.seed * std::sqrt(params.n_atoms);

  auto run = integrate(start, t_w, params.eta, damping, config, c);
  WritePhaseResult out;
  out.final_state = run.final_state;
  out.trace = std::move(run.trace);
  out.spin = SpinWaveAmplitude{run.final_state.s / options.seed};
  out.stiff_step_warning = run.stiff_step_warning;
  return out;
}

IntegrationResult run_conversion_phase(cplx input_p, cplx input_s,
                                       const SpinWaveAmplitude& spin0,
                                       double duration,
                                       const PhysicalParams& params,
                                       const DampingParams& damping,
                                       const IntegratorConfig& config,
                                       const ConversionOptions& options) {
  DampingParams d = damping;
  if (options.mode == ConversionMode::Read) d.gamma_spin = damping.gamma_spin_read;
  FieldState start{input_p, input_s, spin0.value, 0.0};
  Constraints c;
  c.spin_backaction = options.spin_backaction;
  return integrate(start, duration, params.eta, d, config, c);
}

std::vector<double> manley_rowe_drift(const Trace& trace,
                                      ManleyRowePhase phase) {
  std::vector<double> out;
  if (trace.empty()) return out;
  auto quantity = [&](std::size_t i) {
    return phase == ManleyRowePhase::Convert ? trace.i_p[i] + trace.i_s[i]
                                             : trace.i_s[i] - trace.i_spin[i];
  };
  const double q0 = quantity(0);
  double scale = std::abs(q0);
  if (scale == 0.0) {
    for (std::size_t i = 0; i < trace.size(); ++i) {
      scale = std::max({scale, trace.i_p[i], trace.i_s[i], trace.i_spin[i]});
    }
  }
  out.reserve(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out.push_back(scale == 0.0 ? 0.0 : std::abs(quantity(i) - q0) / scale);
  }
  return out;
}

double check_manley_rowe(const Trace& trace, ManleyRowePhase phase) {
  const auto drift = manley_rowe_drift(trace, phase);
  return drift.empty() ? 0.0 : *std::max_element(drift.begin(), drift.end());
}

}  // namespace rabisim
