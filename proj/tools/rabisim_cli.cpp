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

// Command-line front end. Talks to the library only through rabisim.h.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rabisim/rabisim.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

int exit_code(rabisim_status st) {
  switch (st) {
    case RABISIM_OK: return kExitOk;
    case RABISIM_ERR_CONFIG:
    case RABISIM_ERR_ARGUMENT: return kExitConfig;
    default: return kExitRuntime;
  }
}

int fail(rabisim_status st, const char* what) {
  std::fprintf(stderr, "rabisim: %s: %s\n", what, rabisim_last_error());
  return exit_code(st);
}

struct Common {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string engine;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "Scenario config (JSON)")
      ->check(CLI::ExistingFile);
  sub->add_option("--out", c.out_dir, "Output directory (overrides output.dir)");
  sub->add_option("--seed", c.seed, "Seed for synthetic detector noise");
  sub->add_option("--engine", c.engine, "Simulation engine")
      ->check(CLI::IsMember({"meanfield", "gaussian"}));
}

class ConfigHandle {
 public:
  ~ConfigHandle() { rabisim_config_free(ptr_); }
  rabisim_config** out() { return &ptr_; }
  rabisim_config* get() const { return ptr_; }

 private:
  rabisim_config* ptr_ = nullptr;
};

class RecordHandle {
 public:
  ~RecordHandle() { rabisim_record_free(ptr_); }
  rabisim_record** out() { return &ptr_; }
  rabisim_record* get() const { return ptr_; }

 private:
  rabisim_record* ptr_ = nullptr;
};

rabisim_status load(const Common& c, ConfigHandle& cfg) {
  rabisim_status st = c.config_path.empty()
                          ? rabisim_config_from_string(nullptr, cfg.out())
                          : rabisim_config_from_file(c.config_path.c_str(), cfg.out());
  if (st != RABISIM_OK) return st;
  if (!c.engine.empty()) {
    st = rabisim_config_set_engine(cfg.get(), c.engine.c_str());
    if (st != RABISIM_OK) return st;
  }
  if (c.seed) {
    st = rabisim_config_set_seed(cfg.get(), *c.seed);
    if (st != RABISIM_OK) return st;
  }
  if (!c.out_dir.empty()) st = rabisim_config_set_output_dir(cfg.get(), c.out_dir.c_str());
  return st;
}

std::string output_dir(const rabisim_config* cfg) {
  size_t needed = 0;
  rabisim_config_output_dir(cfg, nullptr, 0, &needed);
  std::string buf(needed, '\0');
  rabisim_config_output_dir(cfg, buf.data(), buf.size(), &needed);
  buf.resize(needed - 1);
  return buf;
}

void print_scalar(const rabisim_record* rec, const char* label, const char* name) {
  double v = 0;
  if (rabisim_record_scalar(rec, name, &v) == RABISIM_OK) {
    std::printf("%-22s %.9g\n", label, v);
  }
}

int finish(const rabisim_record* rec, const std::string& dir, const char* report_name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  rabisim_status st = rabisim_record_write_csv(rec, dir.c_str());
  if (st != RABISIM_OK) return fail(st, "writing CSV");
  const std::string report = (std::filesystem::path(dir) / report_name).string();
  st = rabisim_record_write_report(rec, report.c_str());
  if (st != RABISIM_OK) return fail(st, "writing report");
  for (size_t i = 0; i < rabisim_record_warning_count(rec); ++i) {
    std::fprintf(stderr, "warning: %s\n", rabisim_record_warning(rec, i));
  }
  std::printf("%-22s %s\n", "report", report.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate and analyse Raman-driven photon Rabi oscillations"};
  app.set_version_flag("--version", rabisim_version());
  app.require_subcommand(1);

  Common sim, wsweep, psweep;
  std::vector<double> write_powers, probe_powers;
  std::string fit_input, fit_channel = "stokes", fit_out;
  double theta = 0.0;

  auto* simulate = app.add_subcommand("simulate", "Run the configured pulse sequence");
  add_common(simulate, sim);

  auto* sweep_w = app.add_subcommand("sweep-write-power",
                                     "Fit the Rabi frequency across write powers");
  add_common(sweep_w, wsweep);
  sweep_w->add_option("--powers", write_powers, "Write powers in mW (default: config)");

  auto* sweep_p = app.add_subcommand("sweep-probe-power",
                                     "Peak converted intensity across probe powers");
  add_common(sweep_p, psweep);
  sweep_p->add_option("--powers", probe_powers, "Probe powers in mW (default: config)");

  auto* fit = app.add_subcommand("fit", "Fit a damped Rabi model to a trace CSV");
  fit->add_option("--input", fit_input, "Trace CSV (t_us,i_probe,i_stokes,i_spin)")
      ->required()
      ->check(CLI::ExistingFile);
  fit->add_option("--channel", fit_channel, "probe, stokes or spin")
      ->check(CLI::IsMember({"probe", "stokes", "spin", "p", "s", "a"}));
  fit->add_option("--out", fit_out, "Directory for fit_report.json");

  auto* photon = app.add_subcommand("single-photon",
                                    "Output amplitudes for one injected photon");
  photon->add_option("--theta", theta, "Mixing angle in rad")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  if (photon->parsed()) {
    double c1 = 0, c2 = 0;
    rabisim_status st = rabisim_single_photon(theta, &c1, &c2);
    if (st != RABISIM_OK) return fail(st, "single-photon");
    std::printf("theta %.12g\nc1 %.12g\nc2 %.12g\n|c1|^2 %.12g\n|c2|^2 %.12g\n", theta, c1,
                c2, c1 * c1, c2 * c2);
    return kExitOk;
  }

  if (fit->parsed()) {
    RecordHandle rec;
    rabisim_status st = rabisim_fit_csv(fit_input.c_str(), fit_channel.c_str(), rec.out());
    if (st != RABISIM_OK) return fail(st, "fit");
    print_scalar(rec.get(), "omega_rad_per_us", "fit.omega");
    print_scalar(rec.get(), "gamma_per_us", "fit.gamma");
    print_scalar(rec.get(), "amplitude", "fit.amplitude");
    print_scalar(rec.get(), "phi_rad", "fit.phi");
    print_scalar(rec.get(), "offset", "fit.offset");
    print_scalar(rec.get(), "residual_rms", "fit.residual_rms");
    double converged = 0;
    rabisim_record_scalar(rec.get(), "fit.converged", &converged);
    if (!fit_out.empty()) {
      const std::string report = (std::filesystem::path(fit_out) / "fit_report.json").string();
      st = rabisim_record_write_report(rec.get(), report.c_str());
      if (st != RABISIM_OK) return fail(st, "writing report");
      std::printf("%-22s %s\n", "report", report.c_str());
    }
    if (converged == 0.0) {
      std::fprintf(stderr, "rabisim: fit did not converge\n");
      return kExitRuntime;
    }
    return kExitOk;
  }

  const Common& common = simulate->parsed() ? sim : sweep_w->parsed() ? wsweep : psweep;
  ConfigHandle cfg;
  rabisim_status st = load(common, cfg);
  if (st != RABISIM_OK) return fail(st, "config");

  RecordHandle rec;
  const char* report_name = "report.json";
  if (simulate->parsed()) {
    st = rabisim_run_scenario(cfg.get(), rec.out());
    if (st != RABISIM_OK) return fail(st, "simulate");
    print_scalar(rec.get(), "omega_expected", "omega_expected");
    print_scalar(rec.get(), "spin_excitations", "spin_excitations");
    print_scalar(rec.get(), "efficiency", "efficiency");
    print_scalar(rec.get(), "phase_difference", "phase_difference");
  } else if (sweep_w->parsed()) {
    st = rabisim_sweep_write_power(cfg.get(), write_powers.data(), write_powers.size(),
                                   rec.out());
    if (st != RABISIM_OK) return fail(st, "sweep-write-power");
    print_scalar(rec.get(), "scaling_slope", "scaling.slope");
    print_scalar(rec.get(), "scaling_r_squared", "scaling.r_squared");
    report_name = "sweep_write_report.json";
  } else {
    st = rabisim_sweep_probe_power(cfg.get(), probe_powers.data(), probe_powers.size(),
                                   rec.out());
    if (st != RABISIM_OK) return fail(st, "sweep-probe-power");
    print_scalar(rec.get(), "loglog_slope", "loglog.slope");
    print_scalar(rec.get(), "top_decade_slope", "top_decade.slope");
    report_name = "sweep_probe_report.json";
  }
  return finish(rec.get(), output_dir(cfg.get()), report_name);
}
