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

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "bqm/errors.hpp"
#include "bqm/scenario.hpp"

namespace bqm {

namespace {

using nlohmann::json;

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

std::string at_index(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

[[noreturn]] void fail(const std::string& field, const std::string& reason) { throw ValidationError(field, reason); }

void only_keys(const json& j, const std::string& field, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
        fail(field, "expected an object");
    }
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items()) {
        if (!ok.contains(key)) {
            fail(join(field, key), "unknown key");
        }
    }
}

const json& require(const json& j, const std::string& field, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) {
        fail(join(field, key), "missing");
    }
    return *it;
}

double read_number(const json& j, const std::string& field) {
    if (!j.is_number()) {
        fail(field, "expected a number");
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
        fail(field, "must be finite");
    }
    return v;
}

double read_positive(const json& j, const std::string& field) {
    const double v = read_number(j, field);
    if (!(v > 0.0)) {
        fail(field, "must be positive");
    }
    return v;
}

int read_int(const json& j, const std::string& field, int lo) {
    if (!j.is_number_integer()) {
        fail(field, "expected an integer");
    }
    const auto v = j.get<long long>();
    if (v < lo || v > 100000000) {
        fail(field, "must be in [" + std::to_string(lo) + ", 100000000]");
    }
    return static_cast<int>(v);
}

std::string read_string(const json& j, const std::string& field) {
    if (!j.is_string()) {
        fail(field, "expected a string");
    }
    return j.get<std::string>();
}

Complex read_complex(const json& j, const std::string& field) {
    if (j.is_number()) {
        return {read_number(j, field), 0.0};
    }
    if (!j.is_array() || j.size() != 2) {
        fail(field, "expected a complex number as [re, im]");
    }
    return {read_number(j[0], at_index(field, 0)), read_number(j[1], at_index(field, 1))};
}

ComplexVector read_vector(const json& j, const std::string& field, Index dim) {
    if (!j.is_array() || static_cast<Index>(j.size()) != dim) {
        fail(field, "expected an array of " + std::to_string(dim) + " complex entries");
    }
    ComplexVector v(dim);
    for (Index i = 0; i < dim; ++i) {
        v(i) = read_complex(j[static_cast<std::size_t>(i)], at_index(field, static_cast<std::size_t>(i)));
    }
    return v;
}

RealVector read_real_vector(const json& j, const std::string& field, Index dim) {
    if (!j.is_array() || static_cast<Index>(j.size()) != dim) {
        fail(field, "expected an array of " + std::to_string(dim) + " numbers");
    }
    RealVector v(dim);
    for (Index i = 0; i < dim; ++i) {
        v(i) = read_number(j[static_cast<std::size_t>(i)], at_index(field, static_cast<std::size_t>(i)));
    }
    return v;
}

std::vector<double> read_number_list(const json& j, const std::string& field) {
    if (!j.is_array()) {
        fail(field, "expected an array of numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(read_number(j[i], at_index(field, i)));
    }
    return out;
}

ComplexMatrix read_matrix(const json& j, const std::string& field, Index dim) {
    if (!j.is_array() || static_cast<Index>(j.size()) != dim) {
        fail(field, "expected " + std::to_string(dim) + " rows");
    }
    ComplexMatrix m(dim, dim);
    for (Index r = 0; r < dim; ++r) {
        const std::string row_field = at_index(field, static_cast<std::size_t>(r));
        m.row(r) = read_vector(j[static_cast<std::size_t>(r)], row_field, dim).transpose();
    }
    return m;
}

ComplexMatrix read_hermitian(const json& j, const std::string& field, Index dim) {
    ComplexMatrix m = read_matrix(j, field, dim);
    if (!is_hermitian(m, Tolerance{})) {
        fail(field, "matrix is not Hermitian (residual " + std::to_string(hermiticity_residual(m)) + ")");
    }
    return m;
}

std::vector<ComplexMatrix> read_hermitian_list(const json& j, const std::string& field, Index dim) {
    if (!j.is_array() || j.empty()) {
        fail(field, "expected a non-empty array of matrices");
    }
    std::vector<ComplexMatrix> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(read_hermitian(j[i], at_index(field, i), dim));
    }
    return out;
}

bool strictly_ascending(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] > v[i - 1])) {
            return false;
        }
    }
    return true;
}

HamiltonianSpec read_hamiltonian(const json& j, Index dim) {
    const std::string f = "hamiltonian";
    HamiltonianSpec spec;
    if (!j.is_object()) {
        fail(f, "expected an object");
    }
    const std::string kind = read_string(require(j, f, "kind"), join(f, "kind"));
    if (kind == "constant") {
        only_keys(j, f, {"kind", "matrix"});
        spec.kind = HamiltonianKind::constant;
        spec.matrices.push_back(read_hermitian(require(j, f, "matrix"), join(f, "matrix"), dim));
    } else if (kind == "piecewise-constant") {
        only_keys(j, f, {"kind", "breaks", "matrices"});
        spec.kind = HamiltonianKind::piecewise_constant;
        spec.breaks = read_number_list(require(j, f, "breaks"), join(f, "breaks"));
        spec.matrices = read_hermitian_list(require(j, f, "matrices"), join(f, "matrices"), dim);
        if (!strictly_ascending(spec.breaks)) {
            fail(join(f, "breaks"), "must be strictly ascending");
        }
        if (spec.matrices.size() != spec.breaks.size() + 1) {
            fail(join(f, "matrices"), "need exactly one more matrix than breaks");
        }
    } else if (kind == "harmonic-drive") {
        only_keys(j, f, {"kind", "static", "drive", "omega", "phase"});
        spec.kind = HamiltonianKind::harmonic_drive;
        spec.matrices.push_back(read_hermitian(require(j, f, "static"), join(f, "static"), dim));
        spec.matrices.push_back(read_hermitian(require(j, f, "drive"), join(f, "drive"), dim));
        spec.omega = read_number(require(j, f, "omega"), join(f, "omega"));
        if (j.contains("phase")) {
            spec.phase = read_number(j["phase"], join(f, "phase"));
        }
    } else if (kind == "custom-table") {
        only_keys(j, f, {"kind", "times", "matrices"});
        spec.kind = HamiltonianKind::custom_table;
        spec.times = read_number_list(require(j, f, "times"), join(f, "times"));
        spec.matrices = read_hermitian_list(require(j, f, "matrices"), join(f, "matrices"), dim);
        if (spec.times.size() < 2 || !strictly_ascending(spec.times)) {
            fail(join(f, "times"), "need at least two strictly ascending sample times");
        }
        if (spec.matrices.size() != spec.times.size()) {
            fail(join(f, "matrices"), "need one matrix per sample time");
        }
    } else {
        fail(join(f, "kind"),
             "unknown kind '" + kind + "' (expected constant, piecewise-constant, harmonic-drive or custom-table)");
    }
    return spec;
}

Ensemble read_ensemble(const json& j, Index dim) {
    const std::string f = "ensemble";
    if (!j.is_array() || j.empty()) {
        fail(f, "expected a non-empty array of {weight, vector}");
    }
    Ensemble e;
    double total = 0.0;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string mf = at_index(f, i);
        only_keys(j[i], mf, {"weight", "vector"});
        EnsembleMember m;
        m.weight = read_number(require(j[i], mf, "weight"), join(mf, "weight"));
        if (m.weight < 0.0) {
            fail(join(mf, "weight"), "must be non-negative");
        }
        m.vector = read_vector(require(j[i], mf, "vector"), join(mf, "vector"), dim);
        if (m.vector.norm() == 0.0) {
            fail(join(mf, "vector"), "must be nonzero");
        }
        total += m.weight;
        e.members.push_back(std::move(m));
    }
    if (std::abs(total - 1.0) > 1e-9) {
        fail(f, "weights sum to " + std::to_string(total) + ", expected 1");
    }
    return e;
}

FrameSpec read_frames(const json& j, Index dim) {
    const std::string f = "frames";
    only_keys(j, f, {"kind", "seed", "drift", "phases", "rate"});
    FrameSpec spec;
    const std::string kind = read_string(require(j, f, "kind"), join(f, "kind"));
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) {
            fail(join(f, "seed"), "expected a non-negative integer");
        }
        spec.seed = j["seed"].get<std::uint64_t>();
    }
    if (kind == "identity") {
        spec.kind = FrameKind::identity;
    } else if (kind == "random-unitary") {
        spec.kind = FrameKind::random_unitary;
        if (!spec.seed) {
            fail(join(f, "seed"), "required for random-unitary frames");
        }
        if (j.contains("drift")) {
            spec.drift = read_number(j["drift"], join(f, "drift"));
            if (spec.drift < 0.0) {
                fail(join(f, "drift"), "must be non-negative");
            }
        }
    } else if (kind == "co-moving") {
        spec.kind = FrameKind::co_moving;
    } else if (kind == "diagonal-phase") {
        spec.kind = FrameKind::diagonal_phase;
        spec.phases = read_real_vector(require(j, f, "phases"), join(f, "phases"), dim);
        if (j.contains("rate")) {
            spec.rate = read_number(j["rate"], join(f, "rate"));
        }
    } else {
        fail(join(f, "kind"),
             "unknown kind '" + kind + "' (expected identity, random-unitary, co-moving or diagonal-phase)");
    }
    return spec;
}

PictureSpec read_picture(const json& j, Index dim) {
    const std::string f = "picture";
    only_keys(j, f, {"kind", "anchor", "diagonal", "omega"});
    PictureSpec spec;
    const std::string kind = read_string(require(j, f, "kind"), join(f, "kind"));
    if (j.contains("anchor")) {
        spec.anchor = read_number(j["anchor"], join(f, "anchor"));
    }
    if (kind == "schrodinger") {
        spec.kind = PictureKind::schrodinger;
    } else if (kind == "heisenberg") {
        spec.kind = PictureKind::heisenberg;
    } else if (kind == "v-family") {
        spec.kind = PictureKind::v_family;
        spec.diagonal = read_real_vector(require(j, f, "diagonal"), join(f, "diagonal"), dim);
        if (j.contains("omega")) {
            spec.omega = read_number(j["omega"], join(f, "omega"));
        }
    } else {
        fail(join(f, "kind"), "unknown kind '" + kind + "' (expected schrodinger, heisenberg or v-family)");
    }
    return spec;
}

GridSpec read_grid(const json& j) {
    const std::string f = "grid";
    only_keys(j, f, {"t0", "t1", "steps"});
    GridSpec g;
    g.t0 = read_number(require(j, f, "t0"), join(f, "t0"));
    g.t1 = read_number(require(j, f, "t1"), join(f, "t1"));
    g.steps = read_int(require(j, f, "steps"), join(f, "steps"), 1);
    if (!(g.t1 > g.t0)) {
        fail(join(f, "t1"), "must exceed t0");
    }
    return g;
}

std::vector<NamedObservable> read_observables(const json& j, Index dim) {
    const std::string f = "observables";
    if (!j.is_array()) {
        fail(f, "expected an array of {name, matrix}");
    }
    std::vector<NamedObservable> out;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string of = at_index(f, i);
        only_keys(j[i], of, {"name", "matrix"});
        NamedObservable o;
        o.name = read_string(require(j[i], of, "name"), join(of, "name"));
        if (o.name.empty() || o.name.find_first_of(",\"\n\r") != std::string::npos) {
            fail(join(of, "name"), "must be non-empty and free of commas, quotes and newlines");
        }
        if (!seen.insert(o.name).second) {
            fail(join(of, "name"), "duplicate observable name '" + o.name + "'");
        }
        o.matrix = read_hermitian(require(j[i], of, "matrix"), f + "." + o.name, dim);
        out.push_back(std::move(o));
    }
    return out;
}

Tolerances read_tolerances(const json& j) {
    const std::string f = "tolerances";
    Tolerances t;
    if (!j.is_object()) {
        fail(f, "expected an object");
    }
    const std::pair<const char*, double*> fields[] = {
        {"density", &t.density},           {"hermiticity", &t.hermiticity}, {"purity", &t.purity},
        {"formulation", &t.formulation},   {"picture", &t.picture},         {"heisenberg", &t.heisenberg},
        {"integrator", &t.integrator},     {"v_picture", &t.v_picture},     {"derivation", &t.derivation},
        {"curvature_fd", &t.curvature_fd}, {"flat", &t.flat},               {"flatness", &t.flatness},
        {"two_route", &t.two_route},       {"composition", &t.composition},
    };
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const auto& [name, slot] : fields) {
            if (key == name) {
                *slot = read_positive(value, join(f, key));
                known = true;
            }
        }
        if (!known) {
            fail(join(f, key), "unknown key");
        }
    }
    return t;
}

std::string read_file_name(const json& j, const std::string& field) {
    const std::string name = read_string(j, field);
    if (name.empty() || name.find('/') != std::string::npos || name.find('\\') != std::string::npos ||
        name == "." || name == "..") {
        fail(field, "must be a plain file name");
    }
    return name;
}

OutputSpec read_outputs(const json& j) {
    const std::string f = "outputs";
    only_keys(j, f, {"trace", "report", "curvature", "flatness"});
    OutputSpec o;
    if (j.contains("trace")) o.trace_file = read_file_name(j["trace"], join(f, "trace"));
    if (j.contains("report")) o.report_file = read_file_name(j["report"], join(f, "report"));
    if (j.contains("curvature")) o.curvature_file = read_file_name(j["curvature"], join(f, "curvature"));
    if (j.contains("flatness")) o.flatness_file = read_file_name(j["flatness"], join(f, "flatness"));
    return o;
}

CurvatureSpec read_curvature(const json& j) {
    const std::string f = "curvature";
    only_keys(j, f, {"s_samples", "t_samples", "h_step"});
    CurvatureSpec c;
    if (j.contains("s_samples")) c.s_samples = read_int(j["s_samples"], join(f, "s_samples"), 1);
    if (j.contains("t_samples")) c.t_samples = read_int(j["t_samples"], join(f, "t_samples"), 1);
    if (j.contains("h_step")) c.h_step = read_positive(j["h_step"], join(f, "h_step"));
    return c;
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min(byte == 0 ? 0 : byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

}  // namespace

ScenarioConfig load_config_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto [line, column] = line_and_column(text, e.byte);
        throw ParseError(e.what(), line, column);
    }
    only_keys(doc, "", {"name", "dim", "hbar", "hamiltonian", "ensemble", "frames", "picture", "grid", "observables",
                        "tolerances", "outputs", "curvature"});
    ScenarioConfig cfg;
    cfg.name = read_string(require(doc, "", "name"), "name");
    if (cfg.name.empty()) {
        fail("name", "must be non-empty");
    }
    cfg.dim = read_int(require(doc, "", "dim"), "dim", 1);
    if (cfg.dim > kMaxDim) {
        fail("dim", "must not exceed " + std::to_string(kMaxDim));
    }
    if (doc.contains("hbar")) {
        cfg.hbar = read_positive(doc["hbar"], "hbar");
    }
    cfg.hamiltonian = read_hamiltonian(require(doc, "", "hamiltonian"), cfg.dim);
    cfg.ensemble = read_ensemble(require(doc, "", "ensemble"), cfg.dim);
    cfg.grid = read_grid(require(doc, "", "grid"));
    if (doc.contains("frames")) {
        cfg.frames = read_frames(doc["frames"], cfg.dim);
    }
    if (doc.contains("picture")) {
        cfg.picture = read_picture(doc["picture"], cfg.dim);
    }
    if (doc.contains("observables")) {
        cfg.observables = read_observables(doc["observables"], cfg.dim);
    }
    if (doc.contains("tolerances")) {
        cfg.tolerances = read_tolerances(doc["tolerances"]);
    }
    if (doc.contains("outputs")) {
        cfg.outputs = read_outputs(doc["outputs"]);
    }
    if (doc.contains("curvature")) {
        cfg.curvature = read_curvature(doc["curvature"]);
    }

    if (cfg.hamiltonian.kind == HamiltonianKind::custom_table &&
        (cfg.grid.t0 < cfg.hamiltonian.times.front() || cfg.grid.t1 > cfg.hamiltonian.times.back())) {
        fail("grid", "extends beyond the custom-table sample times");
    }
    if (cfg.picture.anchor && (*cfg.picture.anchor < cfg.grid.t0 || *cfg.picture.anchor > cfg.grid.t1)) {
        fail("picture.anchor", "must lie inside the grid");
    }
    return cfg;
}

ScenarioConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(path.string(), "cannot open for reading");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw IoError(path.string(), "read failed");
    }
    return load_config_text(buffer.str());
}

ScenarioConfig load_config(std::string_view path_or_text) {
    for (char c : path_or_text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            continue;
        }
        if (c == '{') {
            return load_config_text(path_or_text);
        }
        break;
    }
    return load_config_file(std::filesystem::path(std::string(path_or_text)));
}

}  // namespace bqm
