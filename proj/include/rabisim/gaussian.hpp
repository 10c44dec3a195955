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

// Gaussian states of M bosonic modes in the quadrature picture.
//
// Convention: x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)); ordering
// (x_1, p_1, ..., x_M, p_M); the vacuum covariance is I/2.

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rabisim/core_model.hpp"

namespace rabisim::gaussian {

inline constexpr const char* kProbe = "P";
inline constexpr const char* kStokes = "S";
inline constexpr const char* kSpin = "A";

class GaussianState {
 public:
  GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov,
                std::vector<std::string> labels);

  std::size_t num_modes() const { return labels_.size(); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Index of a mode label; throws Error(InvalidArgument) when absent.
  std::size_t index(const std::string& label) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  std::vector<std::string> labels_;
};

struct SymplecticMatrix {
  Eigen::MatrixXd m;

  bool is_symplectic(double tol = 1e-10) const;
};

Eigen::MatrixXd symplectic_form(std::size_t num_modes);

/// Vacuum over modes labelled P, S, A (for M = 3) or m0, m1, ... otherwise.
GaussianState vacuum_state(std::size_t num_modes);
GaussianState vacuum_state(std::vector<std::string> labels);

SymplecticMatrix beam_splitter_matrix(std::size_t num_modes, std::size_t i,
                                      std::size_t j, double theta);
SymplecticMatrix two_mode_squeezer_matrix(std::size_t num_modes, std::size_t i,
                                          std::size_t j, double r);

GaussianState apply_symplectic(const GaussianState& state,
                               const SymplecticMatrix& s);

GaussianState displace(const GaussianState& state, const std::string& mode,
                       cplx alpha);

/// a_i <- a_i cos(theta) + a_j sin(theta), a_j <- a_j cos(theta) - a_i sin(theta).
GaussianState apply_beam_splitter(const GaussianState& state,
                                  const std::string& mode_i,
                                  const std::string& mode_j, double theta);

/// a_i <- a_i cosh(r) + a_j^dag sinh(r), and symmetrically for a_j.
GaussianState apply_two_mode_squeezer(const GaussianState& state,
                                      const std::string& mode_i,
                                      const std::string& mode_j, double r);

/// Pure-loss channel with the given power transmissivity in [0, 1].
GaussianState apply_loss(const GaussianState& state, const std::string& mode,
                         double transmissivity);

/// Traces the mode out and replaces it with vacuum.
GaussianState reset_mode(const GaussianState& state, const std::string& mode);

double mean_photon_number(const GaussianState& state, const std::string& mode);

/// Ascending symplectic eigenvalues (one per mode).
std::vector<double> symplectic_eigenvalues(const GaussianState& state);

bool is_physical(const GaussianState& state, double tol = 1e-9);

struct SequenceInputs {
  double write_r = 0.0;
  std::map<std::string, double> transmissivity;  // per mode, applied after write
  cplx probe_alpha{0.0, 0.0};
  double conversion_theta = 0.0;
};

struct SequenceResult {
  double n_probe = 0.0;
  double n_stokes = 0.0;
  double n_spin = 0.0;
  double n_stokes_write = 0.0;  // S1: Stokes photons emitted by the write
  double n_stokes_converted = 0.0;  // S2: Stokes photons after conversion
  GaussianState final_state;
};

/// vacuum -> squeeze(S, A) -> loss -> displace(P) -> beam splitter(S, P).
SequenceResult simulate_full_sequence(const SequenceInputs& in);

}  // namespace rabisim::gaussian
