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

#include "rabisim/rabisim.h"

#include <cstring>
#include <exception>
#include <string>

#include "rabisim/error.hpp"
#include "rabisim/experiment.hpp"
#include "rabisim/io.hpp"

struct rabisim_config {
  rabisim::ScenarioConfig config;
};

struct rabisim_record {
  rabisim::OutputRecord record;
};

namespace {

thread_local std::string g_last_error;

rabisim_status status_for(rabisim::ErrorCode code) {
  using rabisim::ErrorCode;
  switch (code) {
    case ErrorCode::Config: return RABISIM_ERR_CONFIG;
    case ErrorCode::Io: return RABISIM_ERR_IO;
    case ErrorCode::InvalidArgument:
    case ErrorCode::Domain: return RABISIM_ERR_ARGUMENT;
    case ErrorCode::Diverged:
    case ErrorCode::DegenerateFit: return RABISIM_ERR_RUNTIME;
  }
  return RABISIM_ERR_RUNTIME;
}

template <class Fn>
rabisim_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return RABISIM_OK;
  } catch (const rabisim::Error& e) {
    g_last_error = e.what();
    return status_for(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RABISIM_ERR_RUNTIME;
  } catch (...) {
    g_last_error = "unknown error";
    return RABISIM_ERR_RUNTIME;
  }
}

void require(const void* p, const char* what) {
  if (!p) {
    throw rabisim::Error(rabisim::ErrorCode::InvalidArgument,
                         std::string(what) + " must not be null");
  }
}

rabisim_status copy_out(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (!buf || cap == 0) return RABISIM_OK;
  if (cap < s.size() + 1) {
    g_last_error = "buffer too small";
    return RABISIM_ERR_ARGUMENT;
  }
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return RABISIM_OK;
}

std::vector<double> powers_or(const double* powers, size_t count,
                              const std::vector<double>& fallback) {
  if (!powers || count == 0) return fallback;
  return std::vector<double>(powers, powers + count);
}

}  // namespace

extern "C" {

const char* rabisim_version(void) { return rabisim::kVersion; }

const char* rabisim_last_error(void) { return g_last_error.c_str(); }

rabisim_status rabisim_config_from_string(const char* text, rabisim_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    auto cfg = rabisim::parse_config(text ? text : "");
    *out = new rabisim_config{std::move(cfg)};
  });
}

rabisim_status rabisim_config_from_file(const char* path, rabisim_config** out) {
  return guarded([&] {
    require(out, "out");
    require(path, "path");
    *out = nullptr;
    auto cfg = rabisim::load_config_file(path);
    *out = new rabisim_config{std::move(cfg)};
  });
}

void rabisim_config_free(rabisim_config* config) { delete config; }

rabisim_status rabisim_config_set_engine(rabisim_config* config, const char* engine) {
  return guarded([&] {
    require(config, "config");
    require(engine, "engine");
    config->config.engine = rabisim::parse_engine(engine);
  });
}

rabisim_status rabisim_config_set_seed(rabisim_config* config, uint64_t seed) {
  return guarded([&] {
    require(config, "config");
    config->config.seed = seed;
  });
}

rabisim_status rabisim_config_set_output_dir(rabisim_config* config, const char* dir) {
  return guarded([&] {
    require(config, "config");
    require(dir, "dir");
    config->config.output.dir = dir;
  });
}

rabisim_status rabisim_config_output_dir(const rabisim_config* config, char* buf,
                                         size_t cap, size_t* needed) {
  rabisim_status st = guarded([&] { require(config, "config"); });
  if (st != RABISIM_OK) return st;
  return copy_out(config->config.output.dir, buf, cap, needed);
}

rabisim_status rabisim_run_scenario(const rabisim_config* config, rabisim_record** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = nullptr;
    auto rec = rabisim::run_scenario(config->config);
    *out = new rabisim_record{std::move(rec)};
  });
}

rabisim_status rabisim_sweep_write_power(const rabisim_config* config,
                                         const double* powers_mw, size_t count,
                                         rabisim_record** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = nullptr;
    auto rec = rabisim::sweep_write_power(
        config->config, powers_or(powers_mw, count, config->config.sweep.write_powers_mw));
    *out = new rabisim_record{std::move(rec)};
  });
}

rabisim_status rabisim_sweep_probe_power(const rabisim_config* config,
                                         const double* powers_mw, size_t count,
                                         rabisim_record** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = nullptr;
    auto rec = rabisim::sweep_probe_power(
        config->config, powers_or(powers_mw, count, config->config.sweep.probe_powers_mw));
    *out = new rabisim_record{std::move(rec)};
  });
}

rabisim_status rabisim_fit_csv(const char* csv_path, const char* channel,
                               rabisim_record** out) {
  return guarded([&] {
    require(csv_path, "csv_path");
    require(out, "out");
    *out = nullptr;
    const auto ch = rabisim::parse_channel(channel ? channel : "stokes");
    const auto trace = rabisim::load_csv_trace(csv_path);
    auto rec = rabisim::fit_trace(trace, ch, "fit");
    *out = new rabisim_record{std::move(rec)};
  });
}

void rabisim_record_free(rabisim_record* record) { delete record; }

rabisim_status rabisim_record_write_csv(const rabisim_record* record, const char* dir) {
  return guarded([&] {
    require(record, "record");
    require(dir, "dir");
    rabisim::emit_csv(record->record, dir);
  });
}

rabisim_status rabisim_record_write_report(const rabisim_record* record, const char* path) {
  return guarded([&] {
    require(record, "record");
    require(path, "path");
    rabisim::emit_report(record->record, path);
  });
}

rabisim_status rabisim_record_report(const rabisim_record* record, char* buf, size_t cap,
                                     size_t* needed) {
  std::string text;
  rabisim_status st = guarded([&] {
    require(record, "record");
    text = rabisim::report_to_json(record->record);
  });
  if (st != RABISIM_OK) return st;
  return copy_out(text, buf, cap, needed);
}

rabisim_status rabisim_record_scalar(const rabisim_record* record, const char* name,
                                     double* value) {
  return guarded([&] {
    require(record, "record");
    require(name, "name");
    require(value, "value");
    const auto& r = record->record;
    const std::string key = name;
    auto missing = [&]() {
      return rabisim::Error(rabisim::ErrorCode::InvalidArgument,
                            "no scalar named '" + key + "'");
    };
    auto opt = [&](const std::optional<double>& v) {
      if (!v) throw missing();
      *value = *v;
    };
    if (key == "efficiency") return opt(r.efficiency);
    if (key == "phase_difference") return opt(r.phase_difference);
    if (key == "omega_expected") return opt(r.omega_expected);
    if (key == "spin_excitations") return opt(r.spin_excitations);
    const auto dot = key.rfind('.');
    if (dot == std::string::npos) throw missing();
    const std::string head = key.substr(0, dot);
    const std::string field = key.substr(dot + 1);
    for (const auto& reg : r.regressions) {
      if (reg.name != head) continue;
      if (field == "slope") return void(*value = reg.regression.slope);
      if (field == "intercept") return void(*value = reg.regression.intercept);
      if (field == "r_squared") return void(*value = reg.regression.r_squared);
      if (field == "n_points") {
        return void(*value = static_cast<double>(reg.regression.n_points));
      }
    }
    for (const auto& f : r.fits) {
      if (f.name != head) continue;
      const auto& m = f.fit.model;
      if (field == "amplitude") return void(*value = m.amplitude);
      if (field == "omega") return void(*value = m.omega);
      if (field == "gamma") return void(*value = m.gamma);
      if (field == "phi") return void(*value = m.phi);
      if (field == "offset") return void(*value = m.offset);
      if (field == "residual_rms") return void(*value = f.fit.residual_rms);
      if (field == "converged") return void(*value = f.fit.converged ? 1.0 : 0.0);
    }
    throw missing();
  });
}

size_t rabisim_record_warning_count(const rabisim_record* record) {
  return record ? record->record.warnings.size() : 0;
}

const char* rabisim_record_warning(const rabisim_record* record, size_t index) {
  if (!record || index >= record->record.warnings.size()) return nullptr;
  return record->record.warnings[index].c_str();
}

rabisim_status rabisim_single_photon(double theta, double* c1, double* c2) {
  return guarded([&] {
    require(c1, "c1");
    require(c2, "c2");
    const auto st = rabisim::single_photon_output(theta);
    *c1 = st.c1.real();
    *c2 = st.c2.real();
  });
}

}  // extern "C"
