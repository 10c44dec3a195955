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

#include "rabisim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "rabisim/error.hpp"

namespace rabisim {

namespace {

constexpr double kPi = std::numbers::pi;

void require_uniform(const Trace& trace, std::size_t min_samples) {
  if (trace.size() < min_samples) {
    throw Error(ErrorCode::InvalidArgument,
                "trace needs at least " + std::to_string(min_samples) +
                    " samples, got " + std::to_string(trace.size()));
  }
  const std::size_t n = trace.size();
  const double h = (trace.times[n - 1] - trace.times[0]) /
                   static_cast<double>(n - 1);
  if (!(h > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "trace times must increase");
  }
  for (std::size_t i = 1; i < n; ++i) {
    const double step = trace.times[i] - trace.times[i - 1];
    if (std::abs(step - h) > 1e-3 * h) {
      throw Error(ErrorCode::InvalidArgument, "trace time grid is not uniform");
    }
  }
}

double periodogram(const std::vector<double>& t, const std::vector<double>& y,
                   double omega) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    re += y[i] * std::cos(omega * t[i]);
    im -= y[i] * std::sin(omega * t[i]);
  }
  return re * re + im * im;
}

// Golden-section search for the maximum of f on [a, b].
template <class F>
double golden_max(F&& f, double a, double b) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 80 && (b - a) > 1e-14 * std::abs(b); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

struct Projection {
  double amplitude;
  double phi;
  double offset;
};

// Linear least squares of y = B + e^{-gamma t}(C0 + C1 cos 2wt + C2 sin 2wt).
Projection project(const std::vector<double>& t, const std::vector<double>& y,
                   double omega, double gamma) {
  Eigen::MatrixXd basis(static_cast<Eigen::Index>(y.size()), 4);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double env = std::exp(-gamma * t[i]);
    basis(r, 0) = 1.0;
    basis(r, 1) = env;
    basis(r, 2) = env * std::cos(2.0 * omega * t[i]);
    basis(r, 3) = env * std::sin(2.0 * omega * t[i]);
    rhs(r) = y[i];
  }
  const Eigen::VectorXd c = basis.colPivHouseholderQr().solve(rhs);
  const double amplitude = 2.0 * std::hypot(c(2), c(3));
  const double phi = 0.5 * std::atan2(c(3), -c(2));
  // The constant and envelope columns are nearly collinear when gamma * t is
  // small, so the offset is taken from the residual mean instead of c(0).
  double offset = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double sn = std::sin(omega * t[i] + phi);
    offset += y[i] - amplitude * std::exp(-gamma * t[i]) * sn * sn;
  }
  return Projection{amplitude, phi, offset / static_cast<double>(y.size())};
}

double residual_norm(const std::vector<double>& t, const std::vector<double>& y,
                     double omega, double gamma, const Projection& p) {
  double ss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double sn = std::sin(omega * t[i] + p.phi);
    const double e = p.amplitude * std::exp(-gamma * t[i]) * sn * sn + p.offset - y[i];
    ss += e * e;
  }
  return ss;
}

// Heavily damped traces show no periodogram peak away from DC. Scan a
// log-spaced (omega, gamma) grid and keep the best linear projection.
void grid_guess(const std::vector<double>& t, const std::vector<double>& y,
                double bin, double nyquist, DampedRabiModel& guess) {
  const double span = t.back() - t.front();
  double best = std::numeric_limits<double>::infinity();
  constexpr int kOmegaSteps = 80;
  constexpr int kGammaSteps = 16;
  for (int a = 0; a <= kOmegaSteps; ++a) {
    const double w_int = 0.5 * bin * std::pow(2.0 * nyquist / bin, a / double(kOmegaSteps));
    for (int b = 0; b <= kGammaSteps; ++b) {
      const double gamma =
          b == 0 ? 0.0 : 0.1 / span * std::pow(200.0, (b - 1) / double(kGammaSteps - 1));
      const auto proj = project(t, y, 0.5 * w_int, gamma);
      const double ss = residual_norm(t, y, 0.5 * w_int, gamma, proj);
      if (ss < best) {
        best = ss;
        guess.omega = 0.5 * w_int;
        guess.gamma = gamma;
        guess.amplitude = proj.amplitude;
        guess.phi = proj.phi;
        guess.offset = proj.offset;
      }
    }
  }
}

}  // namespace

const std::vector<double>& channel_data(const Trace& trace, Channel channel) {
  switch (channel) {
    case Channel::Probe: return trace.i_p;
    case Channel::Stokes: return trace.i_s;
    case Channel::Spin: return trace.i_spin;
  }
  return trace.i_s;
}

const char* to_string(Channel channel) noexcept {
  switch (channel) {
    case Channel::Probe: return "probe";
    case Channel::Stokes: return "stokes";
    case Channel::Spin: return "spin";
  }
  return "?";
}

Channel parse_channel(const std::string& name) {
  if (name == "probe" || name == "p") return Channel::Probe;
  if (name == "stokes" || name == "s") return Channel::Stokes;
  if (name == "spin" || name == "a") return Channel::Spin;
  throw Error(ErrorCode::InvalidArgument, "unknown channel '" + name + "'");
}

double DampedRabiModel::operator()(double t) const {
  const double s = std::sin(omega * t + phi);
  return amplitude * std::exp(-gamma * t) * s * s + offset;
}

DampedRabiModel initial_guess(const Trace& trace, Channel channel) {
  require_uniform(trace, 8);
  const auto& y = channel_data(trace, channel);
  const auto& t = trace.times;
  const std::size_t n = y.size();
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);

  DampedRabiModel guess;
  guess.offset = *lo;
  guess.amplitude = *hi - *lo;
  if (guess.amplitude <= 1e-12 * std::max(1.0, std::abs(*hi))) {
    guess.amplitude = 0.0;
    guess.offset = mean;
    return guess;
  }

  std::vector<double> centered(n);
  std::transform(y.begin(), y.end(), centered.begin(),
                 [mean](double v) { return v - mean; });
  const double span = t.back() - t.front();
  const double h = span / static_cast<double>(n - 1);
  const double bin = 2.0 * kPi / (static_cast<double>(n) * h);
  std::vector<double> tt(n);
  std::transform(t.begin(), t.end(), tt.begin(),
                 [t0 = t.front()](double v) { return v - t0; });
  const std::size_t kmax = n / 2;
  std::vector<double> power(kmax + 1, 0.0);
  for (std::size_t k = 1; k <= kmax; ++k) {
    power[k] = periodogram(tt, centered, bin * static_cast<double>(k));
  }
  // Skip the low-frequency lobe of the decaying background.
  std::size_t start = 1;
  while (start < kmax && power[start + 1] < power[start]) ++start;
  if (start >= kmax) {
    grid_guess(tt, y, bin, bin * static_cast<double>(kmax), guess);
    guess.phi -= guess.omega * t.front();
    guess.amplitude *= std::exp(guess.gamma * t.front());
    return guess;
  }
  const auto peak = static_cast<std::size_t>(
      std::max_element(power.begin() + static_cast<std::ptrdiff_t>(start),
                       power.end()) -
      power.begin());
  const double w_lo = bin * static_cast<double>(peak - 1);
  const double w_hi = bin * static_cast<double>(std::min(peak + 1, kmax));
  const double w_int = golden_max(
      [&](double w) { return periodogram(tt, centered, w); }, w_lo, w_hi);
  guess.omega = 0.5 * w_int;

  // Decay from the maxima of successive intensity periods.
  const double period = kPi / guess.omega;
  std::vector<Point> envelope;
  double window_start = t.front();
  std::size_t i = 0;
  while (window_start + period <= t.back() + 0.5 * h) {
    double best = -std::numeric_limits<double>::infinity();
    double best_t = window_start;
    for (; i < n && t[i] < window_start + period; ++i) {
      if (y[i] > best) {
        best = y[i];
        best_t = t[i];
      }
    }
    if (best - *lo > 0.0) envelope.emplace_back(best_t, std::log(best - *lo));
    window_start += period;
  }
  if (envelope.size() >= 2) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [x, v] : envelope) {
      sx += x;
      sy += v;
      sxx += x * x;
      sxy += x * v;
    }
    const double m = static_cast<double>(envelope.size());
    const double den = m * sxx - sx * sx;
    if (den > 0.0) guess.gamma = std::max(0.0, -(m * sxy - sx * sy) / den);
  }

  const auto proj = project(t, y, guess.omega, guess.gamma);
  guess.amplitude = proj.amplitude;
  guess.phi = proj.phi;
  guess.offset = proj.offset;
  return guess;
}

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

DampedRabiModel to_model(const Vec& p, bool fixed_gamma) {
  DampedRabiModel m;
  m.amplitude = p(0);
  m.omega = p(1);
  if (fixed_gamma) {
    m.gamma = 0.0;
    m.phi = p(2);
    m.offset = p(3);
  } else {
    m.gamma = p(2);
    m.phi = p(3);
    m.offset = p(4);
  }
  return m;
}

Vec to_params(const DampedRabiModel& m, bool fixed_gamma) {
  Vec p(fixed_gamma ? 4 : 5);
  if (fixed_gamma) {
    p << m.amplitude, m.omega, m.phi, m.offset;
  } else {
    p << m.amplitude, m.omega, m.gamma, m.phi, m.offset;
  }
  return p;
}

// Residuals and Jacobian with columns (A, omega, gamma, phi, B).
void evaluate(const DampedRabiModel& m, const std::vector<double>& t,
              const std::vector<double>& y, Vec& r, Mat* jac) {
  const auto n = static_cast<Eigen::Index>(y.size());
  r.resize(n);
  if (jac) jac->resize(n, 5);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ti = t[static_cast<std::size_t>(i)];
    const double env = std::exp(-m.gamma * ti);
    const double u = m.omega * ti + m.phi;
    const double s = std::sin(u);
    const double s2 = s * s;
    const double sin2u = std::sin(2.0 * u);
    r(i) = m.amplitude * env * s2 + m.offset - y[static_cast<std::size_t>(i)];
    if (jac) {
      (*jac)(i, 0) = env * s2;
      (*jac)(i, 1) = m.amplitude * env * sin2u * ti;
      (*jac)(i, 2) = -ti * m.amplitude * env * s2;
      (*jac)(i, 3) = m.amplitude * env * sin2u;
      (*jac)(i, 4) = 1.0;
    }
  }
}

Mat reduced(const Mat& jac, bool fixed_gamma) {
  if (!fixed_gamma) return jac;
  Mat out(jac.rows(), 4);
  out << jac.col(0), jac.col(1), jac.col(3), jac.col(4);
  return out;
}

struct LmOutcome {
  Vec params;
  std::size_t iterations = 0;
  bool converged = false;
};

void require_nonsingular(const Mat& normal) {
  const double scale = normal.diagonal().cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || normal.diagonal().minCoeff() <= 1e-14 * scale) {
    throw Error(ErrorCode::DegenerateFit,
                "normal matrix is singular: parameters are not identifiable");
  }
}

LmOutcome levenberg_marquardt(const std::vector<double>& t,
                              const std::vector<double>& y, Vec p,
                              bool fixed_gamma, const FitOptions& opt,
                              std::size_t already_used) {
  Vec r;
  Mat jac;
  evaluate(to_model(p, fixed_gamma), t, y, r, &jac);
  Mat j = reduced(jac, fixed_gamma);
  double cost = 0.5 * r.squaredNorm();
  const double data_scale =
      std::inner_product(y.begin(), y.end(), y.begin(), 0.0);
  double lambda = 1e-3;

  LmOutcome out;
  std::size_t it = already_used;
  for (; it < opt.max_iterations; ++it) {
    const Vec g = j.transpose() * r;
    if (g.cwiseAbs().maxCoeff() < opt.gradient_tolerance ||
        cost <= 1e-32 * data_scale) {
      out.converged = true;
      break;
    }
    const Mat normal = j.transpose() * j;
    require_nonsingular(normal);
    Mat damped = normal;
    damped.diagonal() += lambda * normal.diagonal();
    const Vec step = damped.ldlt().solve(-g);
    const Vec trial = p + step;
    Vec r_trial;
    evaluate(to_model(trial, fixed_gamma), t, y, r_trial, nullptr);
    const double trial_cost = 0.5 * r_trial.squaredNorm();
    if (std::isfinite(trial_cost) && trial_cost < cost) {
      const double rel = (cost - trial_cost) / cost;
      p = trial;
      cost = trial_cost;
      evaluate(to_model(p, fixed_gamma), t, y, r, &jac);
      j = reduced(jac, fixed_gamma);
      lambda = std::max(lambda / 10.0, 1e-15);
      if (rel < opt.cost_tolerance) {
        out.converged = true;
        ++it;
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e16) {
        // No representable step lowers the cost any further.
        out.converged = true;
        ++it;
        break;
      }
    }
  }
  out.params = p;
  out.iterations = it;
  return out;
}

DampedRabiModel canonical(DampedRabiModel m) {
  if (m.amplitude < 0.0) {
    m.offset += m.amplitude;
    m.amplitude = -m.amplitude;
    m.phi += 0.5 * kPi;
  }
  if (m.omega < 0.0) {
    m.omega = -m.omega;
    m.phi = -m.phi;
  }
  m.phi = std::fmod(m.phi, kPi);
  if (m.phi < 0.0) m.phi += kPi;
  return m;
}

}  // namespace

FitResult fit_damped_rabi(const Trace& trace, Channel channel,
                          const DampedRabiModel& guess,
                          const FitOptions& options) {
  require_uniform(trace, 25);
  for (double v : {guess.amplitude, guess.omega, guess.gamma, guess.phi,
                   guess.offset}) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::InvalidArgument, "initial guess is not finite");
    }
  }
  const auto& y = channel_data(trace, channel);
  std::vector<double> t(trace.times);
  // Fit in time relative to the first sample, report in absolute time below.
  const double t0 = t.front();
  for (double& v : t) v -= t0;

  DampedRabiModel start = guess;
  start.phi += guess.omega * t0;
  start.amplitude *= std::exp(-guess.gamma * t0);

  auto outcome = levenberg_marquardt(t, y, to_params(start, false), false,
                                     options, 0);
  bool fixed_gamma = false;
  if (to_model(outcome.params, false).gamma < 0.0) {
    auto boundary = to_model(outcome.params, false);
    boundary.gamma = 0.0;
    outcome = levenberg_marquardt(t, y, to_params(boundary, true), true,
                                  options, outcome.iterations);
    fixed_gamma = true;
  }
  DampedRabiModel m = to_model(outcome.params, fixed_gamma);

  Vec r;
  Mat jac;
  evaluate(m, t, y, r, &jac);
  const Mat normal = jac.transpose() * jac;
  require_nonsingular(normal);
  Eigen::FullPivLU<Mat> lu(normal);
  lu.setThreshold(1e-15);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::DegenerateFit, "normal matrix is singular");
  }
  const double n = static_cast<double>(y.size());
  const double dof = std::max(1.0, n - (fixed_gamma ? 4.0 : 5.0));
  const Mat cov = lu.inverse() * (r.squaredNorm() / dof);

  FitResult out;
  // Shift back to absolute time.
  m.phi -= m.omega * t0;
  m.amplitude *= std::exp(m.gamma * t0);
  out.model = canonical(m);
  for (int k = 0; k < 5; ++k) {
    out.param_uncertainties[static_cast<std::size_t>(k)] =
        std::sqrt(std::max(0.0, cov(k, k)));
  }
  out.residual_rms = std::sqrt(r.squaredNorm() / n);
  out.iterations = outcome.iterations;
  out.converged = outcome.converged;
  return out;
}

double phase_difference(const FitResult& a, const FitResult& b) {
  if (!a.converged || !b.converged) {
    throw Error(ErrorCode::InvalidArgument,
                "phase difference needs two converged fits");
  }
  double d = std::fmod(b.model.phi - a.model.phi, kPi);
  if (d < 0.0) d += kPi;
  return d;
}

RegressionResult linear_regression(const std::vector<Point>& points,
                                   std::size_t min_points) {
  if (points.size() < min_points) {
    throw Error(ErrorCode::InvalidArgument,
                "regression needs at least " + std::to_string(min_points) +
                    " points");
  }
  // Sorted accumulation makes the result independent of input order.
  std::vector<Point> sorted(points);
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : sorted) {
    mx += x;
    my += y;
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : sorted) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (!(sxx > 1e-300) || sxx <= 1e-24 * mx * mx * m) {
    throw Error(ErrorCode::InvalidArgument, "regression x values have zero variance");
  }
  RegressionResult out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.n_points = sorted.size();
  double ssr = 0.0;
  for (const auto& [x, y] : sorted) {
    const double e = y - (out.slope * x + out.intercept);
    ssr += e * e;
  }
  out.r_squared = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
  out.residuals.reserve(points.size());
  for (const auto& [x, y] : points) {
    out.residuals.push_back(y - (out.slope * x + out.intercept));
  }
  return out;
}

RegressionResult scaling_regression(const std::vector<Point>& points) {
  return linear_regression(points, 3);
}

RegressionResult loglog_slope(const std::vector<Point>& points) {
  std::vector<Point> logs;
  logs.reserve(points.size());
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "log-log regression needs positive values");
    }
    logs.emplace_back(std::log(x), std::log(y));
  }
  return linear_regression(logs, 3);
}

double trapezoid_area(const Trace& trace, Channel channel) {
  const auto& y = channel_data(trace, channel);
  double area = 0.0;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    area += 0.5 * (trace.times[i] - trace.times[i - 1]) * (y[i] + y[i - 1]);
  }
  return area;
}

EfficiencyResult pulse_area_efficiency(const Trace& output, Channel output_channel,
                                       const Trace& input, Channel input_channel) {
  const double in_area = trapezoid_area(input, input_channel);
  if (!(in_area > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "input pulse area must be > 0");
  }
  EfficiencyResult out;
  out.value = trapezoid_area(output, output_channel) / in_area;
  out.exceeds_unity = out.value > 1.0;
  return out;
}

Peak peak_value(const Trace& trace, Channel channel) {
  if (trace.empty()) {
    throw Error(ErrorCode::InvalidArgument, "peak of an empty trace");
  }
  const auto& y = channel_data(trace, channel);
  const auto it = std::max_element(y.begin(), y.end());  // first maximum
  const auto idx = static_cast<std::size_t>(it - y.begin());
  return Peak{*it, trace.times[idx], idx};
}

}  // namespace rabisim
