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

// Test-only oracles and generators, written independently of the library
// code they check.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <utility>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "rabisim/analysis.hpp"
#include "rabisim/gaussian.hpp"

namespace rabisim::test {

// Propagator of the linear probe/Stokes system d(a_p, a_s)/dt = M (a_p, a_s)
// with M = [[0, -1], [1, 0]] for a real unit spin, via the matrix exponential.
inline std::pair<cplx, cplx> beam_splitter_oracle(cplx ap0, cplx as0, double theta) {
  Eigen::Matrix2d gen;
  gen << 0.0, -theta, theta, 0.0;
  const Eigen::Matrix2d u = gen.exp();
  return {u(0, 0) * ap0 + u(0, 1) * as0, u(1, 0) * ap0 + u(1, 1) * as0};
}

inline DampedRabiModel random_model(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DampedRabiModel m;
  m.amplitude = 0.5 + 1.5 * u(rng);
  m.omega = 1.0 + 3.0 * u(rng);
  m.phi = std::numbers::pi * u(rng);
  m.offset = 0.2 * m.amplitude * u(rng);
  // Total decay exp(-gamma T) between e^-1 and e^-2 over 12 intensity periods.
  const double span = 12.0 * std::numbers::pi / m.omega;
  m.gamma = (1.0 + u(rng)) / span;
  return m;
}

// Samples `periods` intensity periods (pi / omega each) of the model into the
// Stokes channel, with Gaussian noise of sigma = noise * amplitude.
inline Trace synthetic_trace(const DampedRabiModel& m, double periods,
                             int samples_per_period, double noise,
                             std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double span = periods * std::numbers::pi / m.omega;
  const int n = static_cast<int>(periods * samples_per_period);
  Trace tr;
  for (int i = 0; i <= n; ++i) {
    const double t = span * i / n;
    const double clean =
        m.amplitude * std::exp(-m.gamma * t) * std::pow(std::sin(m.omega * t + m.phi), 2) +
        m.offset;
    tr.push(t, 0.0, clean + noise * m.amplitude * gauss(rng), 0.0);
  }
  return tr;
}

inline double max_param_error(const DampedRabiModel& fit, const DampedRabiModel& truth) {
  double dphi = std::fmod(std::abs(fit.phi - truth.phi), std::numbers::pi);
  dphi = std::min(dphi, std::numbers::pi - dphi);
  return std::max({std::abs(fit.amplitude - truth.amplitude) / truth.amplitude,
                   std::abs(fit.omega - truth.omega) / truth.omega,
                   std::abs(fit.gamma - truth.gamma) / truth.gamma, dphi,
                   std::abs(fit.offset - truth.offset) / truth.amplitude});
}

// One random operation drawn from every channel the library offers.
//
// A squeezer that would push covariance entries past kMaxCovariance becomes
// a loss instead: beyond that the squeezed-quadrature variance drops below
// eps * |V|^2 of the stored numbers and no double-precision state resolves
// nu = 1/2 to 1e-9.
inline constexpr double kMaxCovariance = 1000.0;

inline gaussian::GaussianState random_gaussian_op(const gaussian::GaussianState& s,
                                                  std::mt19937_64& rng) {
  namespace gs = rabisim::gaussian;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto& labels = s.labels();
  const std::size_t i = rng() % labels.size();
  std::size_t j = rng() % (labels.size() - 1);
  if (j >= i) ++j;
  switch (rng() % 5) {
    case 0:
      return gs::apply_beam_splitter(s, labels[i], labels[j], 2.0 * std::numbers::pi * u(rng));
    case 1: {
      const double r = 1.5 * u(rng);
      if (s.cov().cwiseAbs().maxCoeff() * std::exp(2.0 * r) > kMaxCovariance) {
        return gs::apply_loss(s, labels[i], u(rng));
      }
      return gs::apply_two_mode_squeezer(s, labels[i], labels[j], r);
    }
    case 2:
      return gs::apply_loss(s, labels[i], u(rng));
    case 3:
      return gs::displace(s, labels[i], cplx(4.0 * u(rng) - 2.0, 4.0 * u(rng) - 2.0));
    default:
      return u(rng) < 0.2 ? gs::reset_mode(s, labels[i])
                          : gs::apply_loss(s, labels[i], 1.0);
  }
}

}  // namespace rabisim::test
