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

#include "rabisim/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rabisim/error.hpp"

namespace rabisim {

using nlohmann::json;

std::string format_csv_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

std::string trace_to_csv(const Trace& trace) {
  std::string out = "t_us,i_probe,i_stokes,i_spin\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += format_csv_value(trace.times[i]);
    out += ',';
    out += format_csv_value(trace.i_p[i]);
    out += ',';
    out += format_csv_value(trace.i_s[i]);
    out += ',';
    out += format_csv_value(trace.i_spin[i]);
    out += '\n';
  }
  return out;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path + "'");
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create directory '" + dir + "': " + ec.message());
}

}  // namespace

std::vector<std::string> emit_csv(const OutputRecord& record, const std::string& dir) {
  ensure_dir(dir);
  std::vector<std::string> paths;
  for (const auto& nt : record.traces) {
    const auto path =
        (std::filesystem::path(dir) / (record.scenario_id + "_" + nt.name + ".csv")).string();
    write_file(path, trace_to_csv(nt.trace));
    paths.push_back(path);
  }
  return paths;
}

Trace parse_csv_trace(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "t_us,i_probe,i_stokes,i_spin") {
    throw Error(ErrorCode::InvalidArgument,
                "line 1: expected header 't_us,i_probe,i_stokes,i_spin'");
  }
  Trace tr;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    double v[4];
    std::size_t pos = 0;
    for (int k = 0; k < 4; ++k) {
      const auto end = line.find(',', pos);
      if ((k < 3) == (end == std::string::npos)) {
        throw Error(ErrorCode::InvalidArgument,
                    "line " + std::to_string(lineno) + ": expected 4 columns");
      }
      const std::string cell = line.substr(pos, end == std::string::npos ? end : end - pos);
      try {
        std::size_t used = 0;
        v[k] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument,
                    "line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
      pos = end + 1;
    }
    if (!tr.empty() && !(v[0] > tr.times.back())) {
      throw Error(ErrorCode::InvalidArgument,
                  "line " + std::to_string(lineno) + ": times must increase");
    }
    tr.push(v[0], v[1], v[2], v[3]);
  }
  return tr;
}

Trace load_csv_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv_trace(ss.str());
}

namespace {

json fit_json(const FitResult& f) {
  const auto& u = f.param_uncertainties;
  return json{{"amplitude", f.model.amplitude},
              {"omega", f.model.omega},
              {"gamma", f.model.gamma},
              {"phi", f.model.phi},
              {"offset", f.model.offset},
              {"uncertainties",
               {{"amplitude", u[0]}, {"omega", u[1]}, {"gamma", u[2]}, {"phi", u[3]},
                {"offset", u[4]}}},
              {"residual_rms", f.residual_rms},
              {"iterations", f.iterations},
              {"converged", f.converged}};
}

json regression_json(const RegressionResult& r) {
  return json{{"slope", r.slope},
              {"intercept", r.intercept},
              {"r_squared", r.r_squared},
              {"n_points", r.n_points},
              {"residuals", r.residuals}};
}

}  // namespace

std::string report_to_json(const OutputRecord& record) {
  json fits = json::object();
  for (const auto& f : record.fits) fits[f.name] = fit_json(f.fit);
  json regs = json::object();
  for (const auto& r : record.regressions) regs[r.name] = regression_json(r.regression);
  json points = json::array();
  for (const auto& p : record.sweep_points) {
    json row{{"power_mw", p.power_mw},
             {"x", p.x},
             {"y", p.y},
             {"expected_omega", p.expected_omega},
             {"spin_excitations", p.spin_excitations},
             {"included", p.included}};
    if (p.fit) row["fit"] = fit_json(*p.fit);
    if (!p.note.empty()) row["note"] = p.note;
    points.push_back(std::move(row));
  }
  json traces = json::array();
  for (const auto& t : record.traces) {
    traces.push_back(json{{"name", t.name}, {"samples", t.trace.size()}});
  }
  json config = json::parse(record.config_json.empty() ? "{}" : record.config_json);
  json doc{{"scenario_id", record.scenario_id},
           {"kind", record.kind},
           {"fits", fits},
           {"regressions", regs},
           {"sweep_points", points},
           {"traces", traces},
           {"warnings", record.warnings},
           {"metadata",
            {{"version", record.version},
             {"timestamp", record.timestamp},
             {"config", config}}}};
  doc["efficiency"] = record.efficiency ? json(*record.efficiency) : json(nullptr);
  doc["phase_difference"] =
      record.phase_difference ? json(*record.phase_difference) : json(nullptr);
  doc["omega_expected"] = record.omega_expected ? json(*record.omega_expected) : json(nullptr);
  doc["spin_excitations"] =
      record.spin_excitations ? json(*record.spin_excitations) : json(nullptr);
  return doc.dump(2) + "\n";
}

void emit_report(const OutputRecord& record, const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
  write_file(path, report_to_json(record));
}

}  // namespace rabisim
