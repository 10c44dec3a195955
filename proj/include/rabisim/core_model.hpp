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

// Physical parameters and closed-form solutions of the Raman conversion model.
//
// Units throughout the library: time in microseconds, rates in rad/us, field
// amplitudes photon-number normalized (|a|^2 counts photons, |S|^2 counts
// spin-wave excitations).

#include <complex>
#include <optional>

namespace rabisim {

using cplx = std::complex<double>;

struct PhysicalParams {
  double g_eg = 0.0;
  double g_em = 0.0;
  double delta = 1.0;
  double eta = 0.0;  // g_eg * g_em / delta
  double n_atoms = 1.0;

  /// Builds a parameter set with eta derived from the couplings.
  /// Throws Error(Domain) for delta == 0 or n_atoms <= 0.
  static PhysicalParams from_couplings(double g_eg, double g_em, double delta,
                                       double n_atoms);
};

struct ResonanceSpec {
  double omega_p = 0.0;
  double omega_s = 0.0;
  double omega_mg = 0.0;
  std::optional<double> read_detuning;
};

/// Classical spin-wave amplitude; |value|^2 counts excitations.
struct SpinWaveAmplitude {
  cplx value{0.0, 0.0};

  double magnitude() const { return std::abs(value); }
  double excitations() const { return std::norm(value); }
};

struct RateSet {
  double kappa = 0.0;
  double omega_rabi = 0.0;
  double theta = 0.0;
};

/// c1 multiplies |1>_Stokes|0>_probe, c2 multiplies |0>_Stokes|1>_probe.
struct SinglePhotonState {
  cplx c1{0.0, 0.0};
  cplx c2{1.0, 0.0};

  double norm() const { return std::norm(c1) + std::norm(c2); }
};

struct ModePair {
  cplx a_p;
  cplx a_s;
};

double coupling_eta(double g_eg, double g_em, double delta);

double write_gain_kappa(double eta, cplx a_w);

/// |S|^2 = min(sinh^2(kappa t_w), n_atoms), real and non-negative.
SpinWaveAmplitude spin_wave_from_write(double kappa, double t_w,
                                       double n_atoms);

double rabi_frequency(double eta, const SpinWaveAmplitude& spin);

/// Beam-splitter evolution of the probe/Stokes pair through angle theta.
ModePair conversion_closed_form(cplx a_p0, cplx a_s0, double theta);

SinglePhotonState single_photon_output(double theta);

/// Accumulated angle for a Rabi frequency decaying as omega0 * exp(-gamma t).
double mixing_angle_with_decay(double omega0, double gamma_s, double t);

bool validate_resonance(const ResonanceSpec& spec, double tol);

RateSet rates_for(const PhysicalParams& params, cplx a_w, double t_w,
                  double conversion_time);

}  // namespace rabisim
