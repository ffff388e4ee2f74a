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

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bqm/errors.hpp"
#include "bqm/scenario.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFailedChecks = 1;
constexpr int kExitError = 2;

std::vector<int> parse_dims(const std::string& text) {
    std::vector<int> dims;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        int value = 0;
        try {
            value = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (item.empty() || used != item.size()) {
            throw bqm::ValidationError("--dims", "'" + item + "' is not an integer");
        }
        dims.push_back(value);
    }
    if (dims.empty()) {
        throw bqm::ValidationError("--dims", "empty list");
    }
    return dims;
}

void print_report(const bqm::InvariantReport& report) {
    std::printf("scenario %s\n", report.scenario.c_str());
    for (const auto& c : report.checks) {
        std::printf("  %s  %-40s %.3e <= %.3e\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.max_deviation,
                    c.threshold);
    }
    std::printf("overall %s\n", report.overall() ? "PASS" : "FAIL");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Density-matrix dynamics on Hilbert bundles: scenario runner and invariant checker"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<double> tolerance;
    bool quiet = false;
    app.add_option("--tolerance", tolerance, "Absolute and relative tolerance of matrix contract checks")
        ->check(CLI::PositiveNumber);
    app.add_flag("--quiet", quiet, "Suppress the report summary on stdout");

    std::string config_path;
    std::string out_dir;

    auto* evolve = app.add_subcommand("evolve", "Run a scenario and write trace.csv and report.json");
    evolve->add_option("--config", config_path, "Scenario JSON file")->required();
    evolve->add_option("--out", out_dir, "Output directory")->required();

    auto* curvature = app.add_subcommand("curvature", "Curvature table and flatness verdict for a scenario");
    curvature->add_option("--config", config_path, "Scenario JSON file")->required();
    curvature->add_option("--out", out_dir, "Output directory")->required();

    std::uint64_t seed = 0;
    int trials = 1;
    std::string dims_text = "2,3,4";
    bool flip_gamma = false;
    auto* verify = app.add_subcommand("verify", "Randomized sweep over every module invariant");
    verify->add_option("--seed", seed, "Base seed");
    verify->add_option("--trials", trials, "Number of random instances");
    verify->add_option("--dims", dims_text, "Comma-separated Hilbert space dimensions in [2, 16]");
    verify->add_option("--out", out_dir, "Directory for report.json");
    verify->add_flag("--flip-gamma-sign", flip_gamma)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    bqm::RunOptions run;
    if (tolerance) {
        run.contract_tol = bqm::Tolerance(*tolerance, *tolerance);
    }

    try {
        bqm::InvariantReport report;
        if (evolve->parsed()) {
            const bqm::ScenarioConfig cfg = bqm::load_config_file(config_path);
            const bqm::EvolveResult result = bqm::run_evolve(cfg, run);
            bqm::write_traces(result.table, result.report, out_dir, cfg.outputs);
            report = result.report;
        } else if (curvature->parsed()) {
            const bqm::ScenarioConfig cfg = bqm::load_config_file(config_path);
            const bqm::CurvatureResult result = bqm::run_curvature(cfg, run);
            bqm::write_curvature(result, out_dir, cfg.outputs);
            report = result.report;
        } else {
            bqm::VerifyOptions opts;
            opts.seed = seed;
            opts.trials = trials;
            opts.dims = parse_dims(dims_text);
            opts.flip_gamma_sign = flip_gamma;
            opts.contract_tol = run.contract_tol;
            report = bqm::run_verify(opts);
            if (!out_dir.empty()) {
                bqm::write_report(report, std::filesystem::path(out_dir) / "report.json");
            }
        }
        if (!quiet) {
            print_report(report);
        }
        return report.overall() ? kExitPass : kExitFailedChecks;
    } catch (const bqm::ParseError& e) {
        std::fprintf(stderr, "bqm: parse error: %s\n", e.what());
    } catch (const bqm::ValidationError& e) {
        std::fprintf(stderr, "bqm: invalid config: %s\n", e.what());
    } catch (const bqm::IoError& e) {
        std::fprintf(stderr, "bqm: i/o error: %s\n", e.what());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "bqm: %s\n", e.what());
    }
    return kExitError;
}
