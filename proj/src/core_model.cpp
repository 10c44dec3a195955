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

#include "rabisim/core_model.hpp"

#include <cmath>
#include <string>

#include "rabisim/error.hpp"

namespace rabisim {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Domain: return "domain error";
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::Config: return "config error";
    case ErrorCode::Diverged: return "integration diverged";
    case ErrorCode::DegenerateFit: return "degenerate fit";
    case ErrorCode::Io: return "i/o error";
  }
  return "unknown error";
}

PhysicalParams PhysicalParams::from_couplings(double g_eg, double g_em,
                                              double delta, double n_atoms) {
  if (!(n_atoms > 0.0)) {
    throw Error(ErrorCode::Domain, "n_atoms must be positive");
  }
  PhysicalParams p;
  p.g_eg = g_eg;
  p.g_em = g_em;
  p.delta = delta;
  p.eta = coupling_eta(g_eg, g_em, delta);
  p.n_atoms = n_atoms;
  return p;
}

double coupling_eta(double g_eg, double g_em, double delta) {
  if (delta == 0.0) {
    throw Error(ErrorCode::Domain, "detuning must be nonzero");
  }
  return g_eg * g_em / delta;
}

double write_gain_kappa(double eta, cplx a_w) { return std::abs(eta * a_w); }

SpinWaveAmplitude spin_wave_from_write(double kappa, double t_w,
                                       double n_atoms) {
  if (t_w < 0.0) {
    throw Error(ErrorCode::Domain, "write duration must be non-negative");
  }
  if (!(n_atoms > 0.0)) {
    throw Error(ErrorCode::Domain, "n_atoms must be positive");
  }
  const double s = std::sinh(kappa * t_w);
  const double excitations = std::min(s * s, n_atoms);
  return SpinWaveAmplitude{cplx(std::sqrt(excitations), 0.0)};
}

double rabi_frequency(double eta, const SpinWaveAmplitude& spin) {
  return std::abs(eta) * spin.magnitude();
}

ModePair conversion_closed_form(cplx a_p0, cplx a_s0, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return ModePair{a_p0 * c - a_s0 * s, a_s0 * c + a_p0 * s};
}

SinglePhotonState single_photon_output(double theta) {
  // Global phase chosen so the probe amplitude is real and non-negative for
  // |theta| <= pi/2.
  return SinglePhotonState{cplx(std::sin(theta), 0.0),
                           cplx(std::cos(theta), 0.0)};
}

double mixing_angle_with_decay(double omega0, double gamma_s, double t) {
  if (t < 0.0 || gamma_s < 0.0) {
    throw Error(ErrorCode::Domain, "mixing angle needs t >= 0, gamma >= 0");
  }
  const double x = gamma_s * t;
  if (x < 1e-6) {
    return omega0 * t * (1.0 - 0.5 * x);
  }
  return -omega0 / gamma_s * std::expm1(-x);
}

bool validate_resonance(const ResonanceSpec& spec, double tol) {
  if (tol < 0.0) {
    throw Error(ErrorCode::Domain, "resonance tolerance must be >= 0");
  }
  return std::abs(spec.omega_p - spec.omega_s - spec.omega_mg) <= tol;
}

RateSet rates_for(const PhysicalParams& params, cplx a_w, double t_w,
                  double conversion_time) {
  RateSet r;
  r.kappa = write_gain_kappa(params.eta, a_w);
  const auto spin = spin_wave_from_write(r.kappa, t_w, params.n_atoms);
  r.omega_rabi = rabi_frequency(params.eta, spin);
  r.theta = r.omega_rabi * conversion_time;
  return r;
}

}  // namespace rabisim
