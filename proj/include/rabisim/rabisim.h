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

#ifndef RABISIM_RABISIM_H_
#define RABISIM_RABISIM_H_

/* C interface of the rabisim library: opaque handles and status codes.
 *
 * Every function returning rabisim_status leaves a thread-local message that
 * rabisim_last_error() returns until the next call on the same thread. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define RABISIM_API __declspec(dllexport)
#else
#  define RABISIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rabisim_status {
  RABISIM_OK = 0,
  RABISIM_ERR_CONFIG = 1,    /* config document rejected */
  RABISIM_ERR_RUNTIME = 2,   /* integration or fit failure */
  RABISIM_ERR_IO = 3,
  RABISIM_ERR_ARGUMENT = 4,  /* null handle, bad channel, bad trace, ... */
} rabisim_status;

typedef struct rabisim_config rabisim_config;
typedef struct rabisim_record rabisim_record;

RABISIM_API const char* rabisim_version(void);
RABISIM_API const char* rabisim_last_error(void);

/* Config handles. Passing NULL/"" text yields the built-in defaults. */
RABISIM_API rabisim_status rabisim_config_from_string(const char* text,
                                                      rabisim_config** out);
RABISIM_API rabisim_status rabisim_config_from_file(const char* path,
                                                    rabisim_config** out);
RABISIM_API void rabisim_config_free(rabisim_config* config);
/* engine: "meanfield" or "gaussian". */
RABISIM_API rabisim_status rabisim_config_set_engine(rabisim_config* config,
                                                     const char* engine);
RABISIM_API rabisim_status rabisim_config_set_seed(rabisim_config* config,
                                                   uint64_t seed);
RABISIM_API rabisim_status rabisim_config_set_output_dir(rabisim_config* config,
                                                         const char* dir);
/* Copies the output directory into buf (NUL-terminated). *needed receives
 * the full length including the terminator. */
RABISIM_API rabisim_status rabisim_config_output_dir(const rabisim_config* config,
                                                     char* buf, size_t cap,
                                                     size_t* needed);

/* Runs. powers == NULL or count == 0 selects the sweep list of the config. */
RABISIM_API rabisim_status rabisim_run_scenario(const rabisim_config* config,
                                                rabisim_record** out);
RABISIM_API rabisim_status rabisim_sweep_write_power(const rabisim_config* config,
                                                     const double* powers_mw,
                                                     size_t count,
                                                     rabisim_record** out);
RABISIM_API rabisim_status rabisim_sweep_probe_power(const rabisim_config* config,
                                                     const double* powers_mw,
                                                     size_t count,
                                                     rabisim_record** out);
/* Fits one channel ("probe", "stokes" or "spin") of a trace CSV file. */
RABISIM_API rabisim_status rabisim_fit_csv(const char* csv_path,
                                           const char* channel,
                                           rabisim_record** out);

RABISIM_API void rabisim_record_free(rabisim_record* record);
RABISIM_API rabisim_status rabisim_record_write_csv(const rabisim_record* record,
                                                    const char* dir);
RABISIM_API rabisim_status rabisim_record_write_report(const rabisim_record* record,
                                                       const char* path);
/* Report JSON; same buffer protocol as rabisim_config_output_dir. */
RABISIM_API rabisim_status rabisim_record_report(const rabisim_record* record,
                                                 char* buf, size_t cap,
                                                 size_t* needed);
/* Scalar results by name: "efficiency", "phase_difference", "omega_expected",
 * "spin_excitations", "<regression>.slope", "<regression>.r_squared",
 * "<fit>.omega", "<fit>.gamma", ... Missing values give RABISIM_ERR_ARGUMENT. */
RABISIM_API rabisim_status rabisim_record_scalar(const rabisim_record* record,
                                                 const char* name, double* value);
RABISIM_API size_t rabisim_record_warning_count(const rabisim_record* record);
RABISIM_API const char* rabisim_record_warning(const rabisim_record* record,
                                               size_t index);

/* Single-photon output amplitudes after mixing angle theta (real parts; the
 * amplitudes are real in the library's phase convention). */
RABISIM_API rabisim_status rabisim_single_photon(double theta, double* c1,
                                                 double* c2);

#ifdef __cplusplus
}
#endif

#endif  // RABISIM_RABISIM_H_
