// Copyright 2026 The BQM Authors
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
#include <cstdio>
#include <fstream>
#include <string>
#include <system_error>

#include <nlohmann/json.hpp>

#include "bqm/errors.hpp"
#include "bqm/scenario.hpp"

namespace bqm {

namespace {

using ordered_json = nlohmann::ordered_json;

void append_number(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

void append_row(std::string& out, std::initializer_list<double> values, bool first) {
    for (double v : values) {
        if (!first) {
            out += ',';
        }
        first = false;
        append_number(out, v);
    }
}

ordered_json complex_matrix_json(const ComplexMatrix& m) {
    ordered_json rows = ordered_json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (Index c = 0; c < m.cols(); ++c) {
            row.push_back({m(r, c).real(), m(r, c).imag()});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError(dir.string(), "cannot create directory: " + ec.message());
    }
    if (!std::filesystem::is_directory(dir, ec)) {
        throw IoError(dir.string(), "not a directory");
    }
}

// Writes through a sibling temporary file and renames it over the target.
void write_file(const std::filesystem::path& file, const std::string& content) {
    std::filesystem::path tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError(tmp.string(), "cannot open for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            throw IoError(tmp.string(), "write failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, file, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError(file.string(), "cannot replace file");
    }
}

}  // namespace

std::string report_json(const InvariantReport& report) {
    ordered_json j;
    j["scenario"] = report.scenario;
    j["checks"] = ordered_json::array();
    for (const auto& c : report.checks) {
        ordered_json check;
        check["name"] = c.name;
        check["max_deviation"] = c.max_deviation;
        check["threshold"] = c.threshold;
        check["pass"] = c.pass;
        j["checks"].push_back(std::move(check));
    }
    j["overall"] = report.overall();
    return j.dump(2) + "\n";
}

std::string trace_csv(const TraceTable& table) {
    std::string out = "t,trace_re,trace_im,purity,min_eig";
    for (const auto& name : table.observable_names) {
        out += "," + name + "_schrodinger," + name + "_heisenberg," + name + "_bundle";
    }
    out += ",gap_formulation,gap_picture,gap_heisenberg_const\n";
    for (const auto& row : table.rows) {
        if (row.means.size() != table.observable_names.size()) {
            throw ShapeError("trace_csv: row has " + std::to_string(row.means.size()) + " observable entries, header has " +
                             std::to_string(table.observable_names.size()));
        }
        append_row(out, {row.t, row.trace_re, row.trace_im, row.purity, row.min_eig}, true);
        for (const auto& m : row.means) {
            append_row(out, {m.schrodinger, m.heisenberg, m.bundle}, false);
        }
        append_row(out, {row.gap_formulation, row.gap_picture, row.gap_heisenberg_const}, false);
        out += '\n';
    }
    return out;
}

std::string curvature_csv(const CurvatureResult& result) {
    std::string out = "s,t,fd_norm,commutator_norm,gap";
    const Index dim = result.samples.empty() ? 0 : result.samples.front().fd.rows();
    for (Index r = 0; r < dim; ++r) {
        for (Index c = 0; c < dim; ++c) {
            const std::string cell = "r_" + std::to_string(r) + "_" + std::to_string(c);
            out += "," + cell + "_re," + cell + "_im";
        }
    }
    out += '\n';
    for (const auto& s : result.samples) {
        append_row(out, {s.s, s.t, s.fd.norm(), s.commutator.norm(), (s.fd - s.commutator).norm()}, true);
        for (Index r = 0; r < dim; ++r) {
            for (Index c = 0; c < dim; ++c) {
                append_row(out, {s.fd(r, c).real(), s.fd(r, c).imag()}, false);
            }
        }
        out += '\n';
    }
    return out;
}

std::string flatness_json(const CurvatureResult& result) {
    ordered_json j;
    j["flat"] = result.verdict.flat;
    j["max_commutator_norm"] = result.verdict.max_commutator_norm;
    j["witness"] = {result.verdict.witness.first, result.verdict.witness.second};
    if (result.flat_frame) {
        j["flat_frame"] = {{"max_gamma", result.flat_frame->max_gamma},
                           {"max_transport_deviation", result.flat_frame->max_transport_deviation}};
    } else {
        j["flat_frame"] = nullptr;
    }
    if (!result.samples.empty()) {
        const auto worst = std::max_element(result.samples.begin(), result.samples.end(),
                                            [](const auto& a, const auto& b) { return a.fd.norm() < b.fd.norm(); });
        j["largest_curvature"] = {{"s", worst->s}, {"t", worst->t}, {"fd", complex_matrix_json(worst->fd)},
                                  {"commutator", complex_matrix_json(worst->commutator)}};
    }
    return j.dump(2) + "\n";
}

void write_report(const InvariantReport& report, const std::filesystem::path& file) {
    if (file.has_parent_path()) {
        ensure_directory(file.parent_path());
    }
    write_file(file, report_json(report));
}

void write_traces(const TraceTable& table, const InvariantReport& report, const std::filesystem::path& out_dir,
                  const OutputSpec& outputs) {
    ensure_directory(out_dir);
    write_file(out_dir / outputs.trace_file, trace_csv(table));
    write_file(out_dir / outputs.report_file, report_json(report));
}

void write_curvature(const CurvatureResult& result, const std::filesystem::path& out_dir, const OutputSpec& outputs) {
    ensure_directory(out_dir);
    write_file(out_dir / outputs.curvature_file, curvature_csv(result));
    write_file(out_dir / outputs.flatness_file, flatness_json(result));
    write_file(out_dir / outputs.report_file, report_json(result.report));
}

}  // namespace bqm
