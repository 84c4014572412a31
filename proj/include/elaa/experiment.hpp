// SPDX-License-Identifier: Apache-2.0
//
// elaa-precoding: low-complexity Kaczmarz-type precoders for near-field
// extremely large antenna arrays
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "elaa/kaczmarz.hpp"
#include "elaa/metrics.hpp"
#include "elaa/precode_assembly.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace elaa
{

struct ExperimentConfig
{
    std::string preset = "desk";
    int n_antennas = 256;
    int n_users = 16;
    int n_subarrays = 16;
    double carrier_freq = 100e9;
    double visibility_p = 0.35;
    int n_paths = 5;
    double snr_db = 0.0;

    std::vector<double> snr_sweep{-10, -5, 0, 5, 10, 15, 20};
    std::vector<int> nt_sweep{64, 128, 256, 512};
    std::vector<int> k_sweep{4, 8, 12, 16, 20, 24};
    std::vector<double> p_sweep{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};

    std::vector<Scheme> schemes{all_schemes().begin(), all_schemes().end()};
    double epsilon = 1e-6;
    std::int64_t max_iterations = 0; // per right-hand side; 0 means 10^4 K
    std::int64_t fixed_iterations = 15; // rate figures
    std::uint64_t seed = 1;
    int n_seeds = 10;
    int workers = 0; // 0: ELAA_WORKERS or 1; not part of the fingerprint

    static ExperimentConfig desk();
    static ExperimentConfig paper();
    static ExperimentConfig from_preset(const std::string& name);

    // Applies one key=value assignment. Throws InvalidArgument on an unknown
    // key or a malformed value.
    void set(const std::string& key, const std::string& value);

    // Rejects K > N_t, S not dividing N_t and out-of-range parameters,
    // including every point of the sweeps.
    void validate() const;

    // Canonical key=value dump (sorted, no workers) and its 64-bit FNV-1a hash.
    std::string canonical() const;
    std::string fingerprint() const;

    ArrayConfig array() const;
    ScenarioParams scenario() const;
};

// Flat key=value text: one assignment per line, '#' starts a comment, blank
// lines ignored. A `preset` line resets every other key to that preset, so it
// is only meaningful as the first assignment.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

// One CSV row in the harness schema.
struct CsvRow
{
    std::string scheme;
    std::string seed; // decimal seed, or "mean"
    int n_antennas = 0;
    int n_users = 0;
    int n_subarrays = 0;
    double visibility_p = 0.0;
    double snr_db = 0.0;
    double iter = 0.0;
    double nmse = 0.0;
    double resid = 0.0;
    double flops_measured = 0.0;
    double flops_analytic = 0.0;
    double sum_rate = 0.0;
};

struct CsvTable
{
    std::string figure;
    std::vector<std::string> metadata; // written as '#' lines
    std::vector<CsvRow> rows;
};

inline constexpr const char* kCsvColumns =
    "run_id,scheme,seed,N_t,K,S,p,snr_db,iter,nmse,resid,flops_measured,flops_analytic,sum_rate";

void write_csv(std::ostream& out, const CsvTable& table, const ExperimentConfig& cfg);

// One realization of the configured scenario: channel from stream 0 of
// `seed`, power controlled at `snr_db`.
struct Instance
{
    std::uint64_t seed = 0;
    double snr_db = 0.0;
    std::shared_ptr<const AugmentedSystem> sys;
    std::shared_ptr<const SubarrayChannel> sub;
    VrStats stats;
    CMatrix f_rzf;
};

Instance make_instance(const ExperimentConfig& cfg, std::uint64_t seed, double snr_db);

// Scheme run on an instance in lockstep evaluation mode. With fixed > 0 the
// run is exactly that many rounds; otherwise it stops at NMSE < epsilon
// against the oracle. VR-aware schemes assemble per subarray.
RunTrace run_scheme(const ExperimentConfig& cfg, const Instance& inst, Scheme scheme, std::int64_t fixed,
                    bool keep_trace);

// Figure sweeps. Each returns the full table; rows are per seed followed by
// seed-averaged rows.
CsvTable run_convergence(const ExperimentConfig& cfg);
CsvTable run_rate_vs_snr(const ExperimentConfig& cfg);
CsvTable run_rate_vs_nt(const ExperimentConfig& cfg);
CsvTable run_flops_vs_k(const ExperimentConfig& cfg);
CsvTable run_flops_vs_nt(const ExperimentConfig& cfg);
CsvTable run_flops_vs_p(const ExperimentConfig& cfg);

} // namespace elaa
