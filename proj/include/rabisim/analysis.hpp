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

// Trace analysis: damped-Rabi fitting, scaling regressions, peak and
// pulse-area metrics.

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "rabisim/meanfield.hpp"

namespace rabisim {

enum class Channel { Probe, Stokes, Spin };

const std::vector<double>& channel_data(const Trace& trace, Channel channel);
const char* to_string(Channel channel) noexcept;
/// Accepts "probe"/"p", "stokes"/"s", "spin"/"a".
Channel parse_channel(const std::string& name);

/// I(t) = A exp(-gamma t) sin^2(omega t + phi) + offset.
///
/// omega is the Rabi frequency: the intensity itself oscillates at 2 omega.
struct DampedRabiModel {
  double amplitude = 0.0;
  double omega = 0.0;
  double gamma = 0.0;
  double phi = 0.0;
  double offset = 0.0;

  double operator()(double t) const;
};

struct FitResult {
  DampedRabiModel model;
  /// Standard errors in the order amplitude, omega, gamma, phi, offset.
  std::array<double, 5> param_uncertainties{};
  double residual_rms = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct RegressionResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n_points = 0;
  /// y - (slope x + intercept), in input order.
  std::vector<double> residuals;
};

/// Starting point for fit_damped_rabi.
///
/// omega comes from the strongest non-DC peak of the periodogram (refined
/// between DFT bins), halved because sin^2 doubles the frequency. gamma
/// comes from the log-envelope of per-period maxima; amplitude, offset and
/// phi from a linear projection at that frequency and decay.
DampedRabiModel initial_guess(const Trace& trace, Channel channel);

struct FitOptions {
  std::size_t max_iterations = 200;
  double cost_tolerance = 1e-10;      // relative cost change
  double gradient_tolerance = 1e-12;  // infinity norm of J^T r
};

/// Levenberg-Marquardt fit of DampedRabiModel. A negative decay estimate is
/// resolved by refitting on the gamma = 0 boundary. Non-convergence returns
/// converged == false with the best parameters found; a singular normal
/// matrix throws Error(DegenerateFit).
FitResult fit_damped_rabi(const Trace& trace, Channel channel,
                          const DampedRabiModel& guess,
                          const FitOptions& options = {});

/// Phase offset phi_b - phi_a of the sin^2 arguments, reduced to [0, pi).
/// Complementary channels give pi/2.
double phase_difference(const FitResult& a, const FitResult& b);

using Point = std::pair<double, double>;

RegressionResult linear_regression(const std::vector<Point>& points,
                                   std::size_t min_points);

/// Least squares of y = ln(omega) against x = sqrt(P_write).
RegressionResult scaling_regression(const std::vector<Point>& points);

/// Least squares of ln(output) against ln(input).
RegressionResult loglog_slope(const std::vector<Point>& points);

struct EfficiencyResult {
  double value = 0.0;
  bool exceeds_unity = false;  // only possible with gain present
};

double trapezoid_area(const Trace& trace, Channel channel);

EfficiencyResult pulse_area_efficiency(const Trace& output, Channel output_channel,
                                       const Trace& input, Channel input_channel);

struct Peak {
  double value = 0.0;
  double time = 0.0;
  std::size_t index = 0;
};

/// Largest sample; ties go to the earliest time.
Peak peak_value(const Trace& trace, Channel channel);

}  // namespace rabisim
