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

#include "rabisim/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Eigenvalues>

#include "rabisim/error.hpp"

namespace rabisim::gaussian {

GaussianState::GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov,
                             std::vector<std::string> labels)
    : mean_(std::move(mean)), cov_(std::move(cov)), labels_(std::move(labels)) {
  const auto dim = static_cast<Eigen::Index>(2 * labels_.size());
  if (labels_.empty() || mean_.size() != dim || cov_.rows() != dim ||
      cov_.cols() != dim) {
    throw Error(ErrorCode::InvalidArgument,
                "gaussian state dimensions do not match the mode count");
  }
}

std::size_t GaussianState::index(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) {
    throw Error(ErrorCode::InvalidArgument, "unknown mode '" + label + "'");
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

Eigen::MatrixXd symplectic_form(std::size_t num_modes) {
  const auto dim = static_cast<Eigen::Index>(2 * num_modes);
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; k += 2) {
    j(k, k + 1) = 1.0;
    j(k + 1, k) = -1.0;
  }
  return j;
}

bool SymplecticMatrix::is_symplectic(double tol) const {
  const auto j = symplectic_form(static_cast<std::size_t>(m.rows() / 2));
  return (m * j * m.transpose() - j).cwiseAbs().maxCoeff() <= tol;
}

GaussianState vacuum_state(std::vector<std::string> labels) {
  if (labels.empty()) {
    throw Error(ErrorCode::InvalidArgument, "need at least one mode");
  }
  const auto dim = static_cast<Eigen::Index>(2 * labels.size());
  return GaussianState(Eigen::VectorXd::Zero(dim),
                       0.5 * Eigen::MatrixXd::Identity(dim, dim),
                       std::move(labels));
}

GaussianState vacuum_state(std::size_t num_modes) {
  if (num_modes == 3) return vacuum_state({kProbe, kStokes, kSpin});
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < num_modes; ++k) {
    labels.push_back("m" + std::to_string(k));
  }
  return vacuum_state(std::move(labels));
}

namespace {

void require_distinct(std::size_t i, std::size_t j) {
  if (i == j) {
    throw Error(ErrorCode::InvalidArgument,
                "two-mode operation needs distinct modes");
  }
}

}  // namespace

SymplecticMatrix beam_splitter_matrix(std::size_t num_modes, std::size_t i,
                                      std::size_t j, double theta) {
  require_distinct(i, j);
  const auto dim = static_cast<Eigen::Index>(2 * num_modes);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(dim, dim);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const auto xi = static_cast<Eigen::Index>(2 * i);
  const auto xj = static_cast<Eigen::Index>(2 * j);
  for (Eigen::Index q = 0; q < 2; ++q) {  // x and p transform alike
    m(xi + q, xi + q) = c;
    m(xi + q, xj + q) = s;
    m(xj + q, xj + q) = c;
    m(xj + q, xi + q) = -s;
  }
  return SymplecticMatrix{m};
}

SymplecticMatrix two_mode_squeezer_matrix(std::size_t num_modes, std::size_t i,
                                          std::size_t j, double r) {
  require_distinct(i, j);
  const auto dim = static_cast<Eigen::Index>(2 * num_modes);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(dim, dim);
  const double ch = std::cosh(r);
  const double sh = std::sinh(r);
  const auto xi = static_cast<Eigen::Index>(2 * i);
  const auto xj = static_cast<Eigen::Index>(2 * j);
  m(xi, xi) = ch;
  m(xi, xj) = sh;
  m(xi + 1, xi + 1) = ch;
  m(xi + 1, xj + 1) = -sh;
  m(xj, xj) = ch;
  m(xj, xi) = sh;
  m(xj + 1, xj + 1) = ch;
  m(xj + 1, xi + 1) = -sh;
  return SymplecticMatrix{m};
}

GaussianState apply_symplectic(const GaussianState& state,
                               const SymplecticMatrix& s) {
  Eigen::MatrixXd cov = s.m * state.cov() * s.m.transpose();
  cov = 0.5 * (cov + cov.transpose()).eval();
  return GaussianState(s.m * state.mean(), std::move(cov), state.labels());
}

GaussianState displace(const GaussianState& state, const std::string& mode,
                       cplx alpha) {
  const auto k = static_cast<Eigen::Index>(2 * state.index(mode));
  Eigen::VectorXd mean = state.mean();
  mean(k) += std::sqrt(2.0) * alpha.real();
  mean(k + 1) += std::sqrt(2.0) * alpha.imag();
  return GaussianState(std::move(mean), state.cov(), state.labels());
}

GaussianState apply_beam_splitter(const GaussianState& state,
                                  const std::string& mode_i,
                                  const std::string& mode_j, double theta) {
  return apply_symplectic(
      state, beam_splitter_matrix(state.num_modes(), state.index(mode_i),
                                  state.index(mode_j), theta));
}

GaussianState apply_two_mode_squeezer(const GaussianState& state,
                                      const std::string& mode_i,
                                      const std::string& mode_j, double r) {
  return apply_symplectic(
      state, two_mode_squeezer_matrix(state.num_modes(), state.index(mode_i),
                                      state.index(mode_j), r));
}

GaussianState apply_loss(const GaussianState& state, const std::string& mode,
                         double transmissivity) {
  if (!(transmissivity >= 0.0 && transmissivity <= 1.0)) {
    throw Error(ErrorCode::Domain, "transmissivity must lie in [0, 1]");
  }
  const auto k = static_cast<Eigen::Index>(2 * state.index(mode));
  const double amp = std::sqrt(transmissivity);
  Eigen::VectorXd mean = state.mean();
  mean.segment(k, 2) *= amp;
  Eigen::MatrixXd cov = state.cov();
  cov.middleRows(k, 2) *= amp;
  cov.middleCols(k, 2) *= amp;
  cov(k, k) += 0.5 * (1.0 - transmissivity);
  cov(k + 1, k + 1) += 0.5 * (1.0 - transmissivity);
  return GaussianState(std::move(mean), std::move(cov), state.labels());
}

GaussianState reset_mode(const GaussianState& state, const std::string& mode) {
  return apply_loss(state, mode, 0.0);
}

double mean_photon_number(const GaussianState& state, const std::string& mode) {
  const auto k = static_cast<Eigen::Index>(2 * state.index(mode));
  const auto& v = state.cov();
  const auto& d = state.mean();
  return 0.5 * (v(k, k) + v(k + 1, k + 1) - 1.0) +
         0.5 * (d(k) * d(k) + d(k + 1) * d(k + 1));
}

std::vector<double> symplectic_eigenvalues(const GaussianState& state) {
  const std::size_t m = state.num_modes();
  const Eigen::MatrixXd j = symplectic_form(m);
  const Eigen::MatrixXd v = 0.5 * (state.cov() + state.cov().transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pos(v);
  std::vector<double> out;
  if (pos.eigenvalues().minCoeff() > 0.0) {
    // i V^1/2 J V^1/2 is Hermitian with eigenvalues +-nu; the symmetric
    // solver keeps the degenerate vacuum pairs accurate.
    const Eigen::MatrixXd root = pos.operatorSqrt();
    const Eigen::MatrixXcd h = std::complex<double>(0.0, 1.0) * (root * j * root).cast<cplx>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> herm(h, Eigen::EigenvaluesOnly);
    for (std::size_t k = 0; k < m; ++k) out.push_back(herm.eigenvalues()(m + k));
    return out;
  }
  // Not positive definite: the state is unphysical; report |Im| of J V.
  Eigen::EigenSolver<Eigen::MatrixXd> solver(j * v, false);
  std::vector<double> nu;
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    nu.push_back(std::abs(solver.eigenvalues()(k).imag()));
  }
  std::sort(nu.begin(), nu.end());
  for (std::size_t k = 0; k < nu.size(); k += 2) out.push_back(0.5 * (nu[k] + nu[k + 1]));
  return out;
}

bool is_physical(const GaussianState& state, double tol) {
  const auto& v = state.cov();
  if ((v - v.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + v.cwiseAbs().maxCoeff())) {
    return false;
  }
  const auto nu = symplectic_eigenvalues(state);
  return nu.front() >= 0.5 - tol;
}

SequenceResult simulate_full_sequence(const SequenceInputs& in) {
  auto state = vacuum_state(3);
  state = apply_two_mode_squeezer(state, kStokes, kSpin, in.write_r);
  const double n_s1 = mean_photon_number(state, kStokes);
  for (const auto& [mode, t] : in.transmissivity) {
    state = apply_loss(state, mode, t);
  }
  state = displace(state, kProbe, in.probe_alpha);
  state = apply_beam_splitter(state, kStokes, kProbe, in.conversion_theta);
  const double n_s = mean_photon_number(state, kStokes);
  return SequenceResult{mean_photon_number(state, kProbe), n_s,
                        mean_photon_number(state, kSpin), n_s1, n_s,
                        std::move(state)};
}

}  // namespace rabisim::gaussian
