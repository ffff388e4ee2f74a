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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bqm/curvature.hpp"
#include "bqm/hilbert.hpp"
#include "bqm/linalg.hpp"

namespace bqm {

enum class HamiltonianKind { constant, piecewise_constant, harmonic_drive, custom_table };
enum class FrameKind { identity, random_unitary, co_moving, diagonal_phase };
enum class PictureKind { schrodinger, heisenberg, v_family };

struct HamiltonianSpec {
    HamiltonianKind kind = HamiltonianKind::constant;
    // constant: one matrix; piecewise-constant: breaks.size() + 1 matrices;
    // harmonic-drive: static and drive term; custom-table: one per entry of times.
    std::vector<ComplexMatrix> matrices;
    std::vector<double> breaks;
    std::vector<double> times;
    double omega = 0.0;
    double phase = 0.0;
};

struct FrameSpec {
    FrameKind kind = FrameKind::identity;
    std::optional<std::uint64_t> seed;
    double drift = 0.5;  // random-unitary
    RealVector phases;   // diagonal-phase
    double rate = 1.0;   // diagonal-phase
};

struct PictureSpec {
    PictureKind kind = PictureKind::schrodinger;
    std::optional<double> anchor;  // defaults to grid.t0
    RealVector diagonal;           // v-family
    double omega = 1.0;            // v-family
};

struct GridSpec {
    double t0 = 0.0;
    double t1 = 1.0;
    int steps = 100;
};

struct NamedObservable {
    std::string name;
    ComplexMatrix matrix;
};

// Report thresholds. Every check in an InvariantReport reads its threshold here.
struct Tolerances {
    double density = 1e-9;
    double hermiticity = 1e-10;
    double purity = 1e-8;
    double formulation = 1e-9;
    double picture = 1e-9;
    double heisenberg = 1e-6;
    double integrator = 1e-6;
    double v_picture = 1e-5;
    double derivation = 1e-6;
    double curvature_fd = 1e-4;
    double flat = 1e-6;
    double flatness = 1e-8;
    double two_route = 1e-8;    // lift/propagate and operator/morphism commutation
    double composition = 1e-6;  // propagator and transport composition
};

struct OutputSpec {
    std::string trace_file = "trace.csv";
    std::string report_file = "report.json";
    std::string curvature_file = "curvature.csv";
    std::string flatness_file = "flatness.json";
};

struct CurvatureSpec {
    int s_samples = 4;
    int t_samples = 4;
    double h_step = 1e-3;
};

struct ScenarioConfig {
    std::string name;
    Index dim = 2;
    double hbar = 1.0;
    HamiltonianSpec hamiltonian;
    Ensemble ensemble;
    FrameSpec frames;
    PictureSpec picture;
    GridSpec grid;
    std::vector<NamedObservable> observables;
    Tolerances tolerances;
    OutputSpec outputs;
    std::optional<CurvatureSpec> curvature;
};

// Accepts JSON text (first non-blank character '{') or a file path.
ScenarioConfig load_config(std::string_view path_or_text);
ScenarioConfig load_config_text(std::string_view text);
ScenarioConfig load_config_file(const std::filesystem::path& path);

struct RunOptions {
    Tolerance contract_tol;  // passed to every linalg contract check
};

HamiltonianFamily build_hamiltonian(const ScenarioConfig& cfg, const RunOptions& opts = {});
PhysicsConfig build_physics(const ScenarioConfig& cfg, const RunOptions& opts = {});

struct ObservableMeans {
    double schrodinger = 0.0;
    double heisenberg = 0.0;
    double bundle = 0.0;
};

struct TraceRow {
    double t = 0.0;
    double trace_re = 0.0;
    double trace_im = 0.0;
    double purity = 0.0;
    double min_eig = 0.0;
    std::vector<ObservableMeans> means;  // one per observable, in config order
    double gap_formulation = 0.0;
    double gap_picture = 0.0;
    double gap_heisenberg_const = 0.0;
};

struct TraceTable {
    std::vector<std::string> observable_names;
    std::vector<TraceRow> rows;
};

struct CheckResult {
    std::string name;
    double max_deviation = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct InvariantReport {
    std::string scenario;
    std::vector<CheckResult> checks;

    // Records deviation <= threshold; NaN deviations fail.
    void add(std::string name, double max_deviation, double threshold);
    // Keeps the largest deviation seen under `name`.
    void merge(const std::string& name, double deviation, double threshold);
    bool overall() const;
};

struct EvolveResult {
    TraceTable table;
    InvariantReport report;
};

EvolveResult run_evolve(const ScenarioConfig& cfg, const RunOptions& opts = {});

struct CurvatureSample {
    double s = 0.0;
    double t = 0.0;
    ComplexMatrix fd;
    ComplexMatrix commutator;
};

struct FlatFrameNumbers {
    double max_gamma = 0.0;
    double max_transport_deviation = 0.0;
};

struct CurvatureResult {
    std::vector<CurvatureSample> samples;
    FlatnessVerdict verdict;
    std::optional<FlatFrameNumbers> flat_frame;
    InvariantReport report;
};

CurvatureResult run_curvature(const ScenarioConfig& cfg, const RunOptions& opts = {});

struct VerifyOptions {
    std::uint64_t seed = 0;
    int trials = 1;
    std::vector<int> dims{2, 3, 4};
    bool flip_gamma_sign = false;  // mutation canary: negates the transport coefficients
    Tolerance contract_tol;
};

InvariantReport run_verify(const VerifyOptions& opts);

std::string report_json(const InvariantReport& report);
std::string trace_csv(const TraceTable& table);
std::string curvature_csv(const CurvatureResult& result);
std::string flatness_json(const CurvatureResult& result);

// Writes <out>/<outputs.trace_file> and <out>/<outputs.report_file>, creating
// the directory if needed. Throws IoError naming the offending path.
void write_traces(const TraceTable& table, const InvariantReport& report, const std::filesystem::path& out_dir,
                  const OutputSpec& outputs = {});
void write_curvature(const CurvatureResult& result, const std::filesystem::path& out_dir,
                     const OutputSpec& outputs = {});
void write_report(const InvariantReport& report, const std::filesystem::path& file);

}  // namespace bqm
