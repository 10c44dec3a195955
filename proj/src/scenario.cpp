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

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <ctime>
#include <numbers>
#include <optional>
#include <random>
#include <thread>

#include "rabisim/error.hpp"
#include "rabisim/experiment.hpp"
#include "rabisim/gaussian.hpp"

namespace rabisim {

namespace {

namespace gs = gaussian;

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Sample times of integrate(): n equal steps, every record_every-th step
// plus the last one.
std::vector<double> sample_times(double duration, const IntegratorConfig& cfg) {
  const auto n = static_cast<std::size_t>(
      std::max(1.0, std::ceil(duration / cfg.dt - 1e-9)));
  if (n > cfg.max_steps) {
    throw Error(ErrorCode::Config, "trace needs more than integrator.max_steps steps");
  }
  const double h = duration / static_cast<double>(n);
  std::vector<double> out{0.0};
  for (std::size_t i = 1; i <= n; ++i) {
    if (i % cfg.record_every == 0 || i == n) out.push_back(static_cast<double>(i) * h);
  }
  return out;
}

bool has_read(const ScenarioConfig& c) {
  const auto* seg = c.conversion_segment();
  return seg && seg->kind == SegmentKind::Read;
}

// Spin wave and (for the Gaussian engine) the joint state right before the
// conversion segment.
struct Prepared {
  SpinWaveAmplitude spin;
  std::optional<gs::GaussianState> state;
  std::optional<Trace> write_trace;
  double omega_expected = 0.0;
};

Prepared prepare(const ScenarioConfig& c, bool record_write) {
  Prepared out;
  const bool read = has_read(c);
  if (c.engine == Engine::Gaussian) out.state = gs::vacuum_state(3);
  for (std::size_t idx = 0; idx < c.sequence.size(); ++idx) {
    const auto& seg = c.sequence[idx];
    if (seg.kind == SegmentKind::Probe || seg.kind == SegmentKind::Read) break;
    try {
      switch (seg.kind) {
        case SegmentKind::OpticalPump: {
          const double residual = read ? std::sqrt(seg.residual_m) : 0.0;
          out.spin = SpinWaveAmplitude{cplx(residual, 0.0)};
          if (out.state) {
            out.state = gs::displace(gs::vacuum_state(3), gs::kSpin, cplx(residual, 0.0));
          }
          break;
        }
        case SegmentKind::Write: {
          const cplx a_w = power_to_amplitude(seg.power_mw, c.power_calibration);
          if (out.state) {
            const double kappa = write_gain_kappa(c.params.eta, a_w);
            const gs::GaussianState before = *out.state;
            auto squeeze = [&](double t) {
              auto s = gs::apply_two_mode_squeezer(before, gs::kStokes, gs::kSpin, kappa * t);
              const double n_a = gs::mean_photon_number(s, gs::kSpin);
              if (c.atom_cap && n_a > c.params.n_atoms) {
                s = gs::apply_loss(s, gs::kSpin, c.params.n_atoms / n_a);
              }
              return s;
            };
            if (record_write) {
              Trace tr;
              for (double t : sample_times(seg.duration_us, c.integrator)) {
                const auto s = squeeze(t);
                tr.push(t, std::norm(a_w), gs::mean_photon_number(s, gs::kStokes),
                        gs::mean_photon_number(s, gs::kSpin));
              }
              out.write_trace = std::move(tr);
            }
            // The write-phase Stokes field S1 leaves the cell.
            out.state = gs::reset_mode(squeeze(seg.duration_us), gs::kStokes);
            out.spin = SpinWaveAmplitude{
                cplx(std::sqrt(gs::mean_photon_number(*out.state, gs::kSpin)), 0.0)};
          } else {
            WriteOptions opt;
            opt.seed = c.seed_amplitude;
            opt.initial_spin = out.spin.value;
            opt.depleted_pump = c.depletion;
            opt.atom_cap = c.atom_cap;
            // Gain of the write phase follows the undamped closed form.
            auto res = run_write_phase(a_w, seg.duration_us, c.params, DampingParams{},
                                       c.integrator, opt);
            out.spin = res.spin;
            if (record_write) {
              const double norm = c.seed_amplitude * c.seed_amplitude;
              Trace tr;
              for (std::size_t i = 0; i < res.trace.size(); ++i) {
                tr.push(res.trace.times[i], res.trace.i_p[i], res.trace.i_s[i] / norm,
                        res.trace.i_spin[i] / norm);
              }
              out.write_trace = std::move(tr);
            }
          }
          break;
        }
        case SegmentKind::Delay: {
          const double decay = std::exp(-c.damping.gamma_spin * seg.tau_us);
          if (out.state) {
            out.state = gs::apply_loss(*out.state, gs::kSpin, decay * decay);
            out.spin = SpinWaveAmplitude{
                cplx(std::sqrt(gs::mean_photon_number(*out.state, gs::kSpin)), 0.0)};
          } else {
            out.spin.value *= decay;
          }
          break;
        }
        default:
          break;
      }
    } catch (const Error& e) {
      throw Error(e.code(), "segment " + std::to_string(idx) + " (" +
                                to_string(seg.kind) + "): " + e.what());
    }
  }
  out.omega_expected = rabi_frequency(c.params.eta, out.spin);
  return out;
}

// Conversion trace for the given injected power on the given time grid.
Trace convert(const ScenarioConfig& c, const Prepared& prep, SegmentKind kind,
              double power_mw, double duration, const IntegratorConfig& grid,
              const SpinWaveAmplitude& spin) {
  const cplx amp = power_to_amplitude(power_mw, c.power_calibration);
  const bool read = kind == SegmentKind::Read;
  const cplx in_p = read ? cplx(0.0, 0.0) : amp;
  const cplx in_s = read ? amp : cplx(0.0, 0.0);
  if (c.engine == Engine::MeanField) {
    ConversionOptions opt;
    opt.mode = read ? ConversionMode::Read : ConversionMode::Probe;
    opt.spin_backaction = c.depletion;
    return run_conversion_phase(in_p, in_s, spin, duration, c.params, c.damping, grid, opt)
        .trace;
  }
  const double gamma_spin = read ? c.damping.gamma_spin_read : c.damping.gamma_spin;
  const double omega0 = rabi_frequency(c.params.eta, spin);
  gs::GaussianState start = prep.state ? *prep.state : gs::vacuum_state(3);
  if (spin.magnitude() == 0.0) start = gs::reset_mode(start, gs::kSpin);
  start = gs::displace(start, read ? gs::kStokes : gs::kProbe, amp);
  Trace tr;
  for (double t : sample_times(duration, grid)) {
    auto s = gs::apply_beam_splitter(start, gs::kStokes, gs::kProbe,
                                     mixing_angle_with_decay(omega0, gamma_spin, t));
    s = gs::apply_loss(s, gs::kProbe, std::exp(-2.0 * c.damping.gamma_p * t));
    s = gs::apply_loss(s, gs::kStokes, std::exp(-2.0 * c.damping.gamma_stokes * t));
    s = gs::apply_loss(s, gs::kSpin, std::exp(-2.0 * gamma_spin * t));
    tr.push(t, gs::mean_photon_number(s, gs::kProbe), gs::mean_photon_number(s, gs::kStokes),
            gs::mean_photon_number(s, gs::kSpin));
  }
  return tr;
}

void add_noise(Trace& tr, double fraction, std::uint64_t seed) {
  if (fraction <= 0.0 || tr.empty()) return;
  const double peak = std::max(*std::max_element(tr.i_p.begin(), tr.i_p.end()),
                               *std::max_element(tr.i_s.begin(), tr.i_s.end()));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, fraction * peak);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    tr.i_p[i] += noise(rng);
    tr.i_s[i] += noise(rng);
  }
}

std::optional<FitResult> try_fit(const Trace& tr, Channel ch, std::string* warning) {
  try {
    const auto guess = initial_guess(tr, ch);
    auto fit = fit_damped_rabi(tr, ch, guess);
    if (!fit.converged) *warning = std::string("fit of ") + to_string(ch) + " did not converge";
    return fit;
  } catch (const Error& e) {
    *warning = std::string("fit of ") + to_string(ch) + " failed: " + e.what();
    return std::nullopt;
  }
}

// Runs fn(i) for i in [0, n) on up to `workers` threads; results are stored
// by index so the output never depends on scheduling.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void require_powers(const std::vector<double>& powers) {
  if (powers.size() < 3) {
    throw Error(ErrorCode::InvalidArgument, "a sweep needs at least 3 powers");
  }
  for (double p : powers) {
    if (!(p > 0.0)) throw Error(ErrorCode::InvalidArgument, "sweep powers must be > 0");
  }
}

OutputRecord new_record(const ScenarioConfig& c, const char* kind) {
  OutputRecord r;
  r.scenario_id = c.scenario_id;
  r.kind = kind;
  r.config_json = config_to_json(c);
  r.timestamp = utc_timestamp();
  return r;
}

}  // namespace

OutputRecord run_scenario(const ScenarioConfig& config) {
  config.validate();
  OutputRecord rec = new_record(config, "simulate");
  const Prepared prep = prepare(config, true);
  if (prep.write_trace) rec.traces.push_back({"write", *prep.write_trace});
  rec.omega_expected = prep.omega_expected;
  rec.spin_excitations = prep.spin.excitations();
  if (config.engine == Engine::Gaussian && config.depletion) {
    rec.warnings.push_back("depletion has no effect on the gaussian engine");
  }

  const PulseSegment* seg = config.conversion_segment();
  if (!seg) return rec;
  const auto idx = static_cast<std::size_t>(seg - config.sequence.data());
  const bool read = seg->kind == SegmentKind::Read;
  const Channel injected = read ? Channel::Stokes : Channel::Probe;
  const Channel converted = read ? Channel::Probe : Channel::Stokes;
  const std::string name = to_string(seg->kind);
  try {
    Trace tr = convert(config, prep, seg->kind, seg->power_mw, seg->duration_us,
                       config.integrator, prep.spin);
    add_noise(tr, config.output.noise_fraction, config.seed);
    if (config.output.efficiency) {
      Trace ref = convert(config, prep, seg->kind, seg->power_mw, seg->duration_us,
                          config.integrator, SpinWaveAmplitude{});
      if (trapezoid_area(ref, injected) > 0.0) {
        const auto eff = pulse_area_efficiency(tr, converted, ref, injected);
        rec.efficiency = eff.value;
        if (eff.exceeds_unity) rec.warnings.push_back("pulse-area efficiency exceeds 1");
      }
      rec.traces.push_back({"reference", std::move(ref)});
    }
    if (config.output.fit && prep.omega_expected > 0.0 && seg->power_mw > 0.0) {
      std::string w1, w2;
      auto fit_in = try_fit(tr, injected, &w1);
      auto fit_out = try_fit(tr, converted, &w2);
      if (!w1.empty()) rec.warnings.push_back(w1);
      if (!w2.empty()) rec.warnings.push_back(w2);
      if (fit_in) rec.fits.push_back({name + "_" + to_string(injected), *fit_in});
      if (fit_out) rec.fits.push_back({name + "_" + to_string(converted), *fit_out});
      if (fit_in && fit_out && fit_in->converged && fit_out->converged) {
        rec.phase_difference = phase_difference(*fit_in, *fit_out);
      }
    }
    rec.traces.insert(rec.traces.begin() + (prep.write_trace ? 1 : 0), {name, std::move(tr)});
  } catch (const Error& e) {
    throw Error(e.code(), "segment " + std::to_string(idx) + " (" + name + "): " + e.what());
  }
  return rec;
}

OutputRecord sweep_write_power(const ScenarioConfig& config,
                               const std::vector<double>& powers_mw) {
  config.validate();
  require_powers(powers_mw);
  if (!config.find(SegmentKind::Write)) {
    throw Error(ErrorCode::Config, "write-power sweep needs a write segment");
  }
  OutputRecord rec = new_record(config, "sweep-write-power");
  const PulseSegment* conv = config.conversion_segment();
  const SegmentKind kind = conv ? conv->kind : SegmentKind::Probe;
  const double probe_power = conv ? conv->power_mw : 1.0;
  const Channel converted = kind == SegmentKind::Read ? Channel::Probe : Channel::Stokes;

  std::vector<SweepPoint> points(powers_mw.size());
  std::vector<Trace> traces(powers_mw.size());
  parallel_for(points.size(), config.sweep.workers, [&](std::size_t i) {
    ScenarioConfig c = config;
    c.find(SegmentKind::Write)->power_mw = powers_mw[i];
    const Prepared prep = prepare(c, false);
    SweepPoint& pt = points[i];
    pt.power_mw = powers_mw[i];
    pt.x = std::sqrt(powers_mw[i]);
    pt.expected_omega = prep.omega_expected;
    pt.spin_excitations = prep.spin.excitations();
    if (!(prep.omega_expected > 0.0)) {
      pt.included = false;
      pt.note = "no spin wave";
      return;
    }
    const double intensity_period = std::numbers::pi / prep.omega_expected;
    const double window = config.sweep.periods * intensity_period;
    const auto samples = static_cast<std::size_t>(
        std::ceil(config.sweep.periods * static_cast<double>(config.sweep.samples_per_period)));
    IntegratorConfig grid = c.integrator;
    grid.record_every = config.sweep.substeps;
    grid.dt = window / static_cast<double>(samples * config.sweep.substeps);
    Trace tr = convert(c, prep, kind, probe_power, window, grid, prep.spin);
    add_noise(tr, config.output.noise_fraction,
              splitmix64(config.seed ^ std::bit_cast<std::uint64_t>(powers_mw[i])));
    std::string warn;
    auto fit = try_fit(tr, converted, &warn);
    pt.fit = fit;
    if (!fit || !fit->converged) {
      pt.included = false;
      pt.note = warn;
    } else {
      pt.y = fit->model.omega;
    }
    traces[i] = std::move(tr);
  });

  std::vector<Point> reg;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& pt = points[i];
    if (pt.included) {
      reg.emplace_back(pt.x, std::log(pt.y));
    } else {
      rec.warnings.push_back("point " + std::to_string(i) + " (" +
                             std::to_string(pt.power_mw) + " mW) excluded: " + pt.note);
    }
    if (!traces[i].empty()) {
      rec.traces.push_back({"write_sweep_" + std::to_string(i), std::move(traces[i])});
    }
  }
  if (reg.size() < 3) {
    throw Error(ErrorCode::DegenerateFit,
                "write-power sweep kept fewer than 3 converged points");
  }
  rec.regressions.push_back({"scaling", scaling_regression(reg)});
  rec.sweep_points = std::move(points);
  return rec;
}

OutputRecord sweep_probe_power(const ScenarioConfig& config,
                               const std::vector<double>& powers_mw) {
  config.validate();
  require_powers(powers_mw);
  const PulseSegment* conv = config.conversion_segment();
  if (!conv) throw Error(ErrorCode::Config, "probe-power sweep needs a probe or read segment");
  OutputRecord rec = new_record(config, "sweep-probe-power");
  const Prepared prep = prepare(config, false);
  rec.omega_expected = prep.omega_expected;
  rec.spin_excitations = prep.spin.excitations();
  const Channel converted = conv->kind == SegmentKind::Read ? Channel::Probe : Channel::Stokes;

  std::vector<SweepPoint> points(powers_mw.size());
  std::vector<Trace> traces(powers_mw.size());
  parallel_for(points.size(), config.sweep.workers, [&](std::size_t i) {
    Trace tr = convert(config, prep, conv->kind, powers_mw[i], conv->duration_us,
                       config.integrator, prep.spin);
    add_noise(tr, config.output.noise_fraction,
              splitmix64(config.seed ^ std::bit_cast<std::uint64_t>(powers_mw[i])));
    SweepPoint& pt = points[i];
    pt.power_mw = powers_mw[i];
    pt.x = powers_mw[i];
    pt.y = peak_value(tr, converted).value;
    pt.expected_omega = prep.omega_expected;
    pt.spin_excitations = prep.spin.excitations();
    if (!(pt.y > 0.0)) {
      pt.included = false;
      pt.note = "no converted signal";
    }
    traces[i] = std::move(tr);
  });

  std::vector<Point> all;
  double p_max = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].included) {
      all.emplace_back(points[i].x, points[i].y);
      p_max = std::max(p_max, points[i].x);
    } else {
      rec.warnings.push_back("point " + std::to_string(i) + " excluded: " + points[i].note);
    }
    rec.traces.push_back({"probe_sweep_" + std::to_string(i), std::move(traces[i])});
  }
  rec.regressions.push_back({"loglog", loglog_slope(all)});
  std::vector<Point> top;
  for (const auto& p : all) {
    if (p.first >= 0.1 * p_max * (1.0 - 1e-12)) top.push_back(p);
  }
  if (top.size() >= 3) rec.regressions.push_back({"top_decade", loglog_slope(top)});
  rec.sweep_points = std::move(points);
  return rec;
}

OutputRecord fit_trace(const Trace& trace, Channel channel, const std::string& name) {
  OutputRecord rec;
  rec.scenario_id = name;
  rec.kind = "fit";
  rec.timestamp = utc_timestamp();
  rec.config_json = "{}";
  const auto guess = initial_guess(trace, channel);
  const auto fit = fit_damped_rabi(trace, channel, guess);
  if (!fit.converged) rec.warnings.push_back("fit did not converge");
  rec.fits.push_back({name, fit});
  return rec;
}

}  // namespace rabisim
