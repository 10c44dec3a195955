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

#include <string>

#include "rabisim/experiment.hpp"

namespace rabisim {

/// Formats one CSV value: shortest "%.9g" rendering.
std::string format_csv_value(double v);

/// Writes `<dir>/<scenario_id>_<trace>.csv` per trace with header
/// `t_us,i_probe,i_stokes,i_spin` and LF line endings. Returns the paths.
std::vector<std::string> emit_csv(const OutputRecord& record,
                                  const std::string& dir);

std::string trace_to_csv(const Trace& trace);

/// Parses the CSV produced by trace_to_csv. Throws Error(InvalidArgument)
/// naming the offending line.
Trace parse_csv_trace(const std::string& text);
Trace load_csv_trace(const std::string& path);

/// JSON report with sorted keys; see docs/formats.md.
std::string report_to_json(const OutputRecord& record);
void emit_report(const OutputRecord& record, const std::string& path);

}  // namespace rabisim
