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

#include "elaa/channel_model.hpp"
#include "elaa/kaczmarz.hpp"
#include "elaa/vr_graph.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace elaa
{

// ||F_ref - F||_F / ||F_ref||_F. Throws InvalidArgument on shape mismatch or
// a zero reference.
double nmse(const CMatrix& F, const CMatrix& F_ref);

struct RateResult
{
    std::vector<double> per_user; // bit/s/Hz
    double sum = 0.0;
};

// Per-user rates with rho = 1 and sigma^2 = mean_k ||h_k||^2 / snr, the
// convention of power_control. Requires ||F||_F <= 1 + 1e-9.
RateResult spectral_efficiency(const CMatrix& H, const CMatrix& F, double snr_linear);

enum class FlopFormula
{
    RZF,
    URK,
    SworERK,
    GK,
    VrOgrk,
    VrOahk
};

// Realized visibility statistics entering the VR-aware cost formulas.
struct VrStats
{
    double antennas = 0.0;     // mean |Gamma_k|
    double neighbors = 0.0;    // mean |X_k|
    double subarray_users = 0.0; // mean |Q_s|
    int orthogonal = 0;        // |O|
    int non_orthogonal = 0;    // |N|
};

VrStats realized_vr_stats(const ChannelMatrix& channel, const UserPartition& partition);

// Closed-form real-flop count. T is the number of single-rhs iterations the
// per-iteration term is multiplied by.
double analytic_flops(FlopFormula formula, int n_antennas, int n_users, double T, const VrStats& stats = {});

// Per-iteration term of the formula (the coefficient of T).
double analytic_flops_per_iteration(FlopFormula formula, int n_antennas, int n_users, const VrStats& stats = {});

// Formula that prices a scheme; AHK has none.
std::optional<FlopFormula> formula_for(Scheme scheme);

struct ConvergenceBound
{
    double kappa = 0.0; // smallest singular value of G^H
    double frob = 0.0;  // ||G^H||_F
    double eta = 1.0;   // 1 - kappa^2 / frob^2
    bool contracting() const { return eta < 1.0; }
};

// Dense eigen-decomposition of H^H H + xi I. Throws InvalidArgument for
// K > 64, where the diagnostic is not meant to be used.
ConvergenceBound estimate_rate_bound(const AugmentedSystem& sys);

// Exact contraction ||e'||^2 / ||e||^2 of an aggregated projection with
// weights r_i / e_i on `rows`, e = x - x*: 1 - cos^2(A^H D A e, e). Returns
// 1 when e is already zero.
double aggregation_contraction(const SolverState& state, const AugmentedSystem& sys, const CVector& v,
                               std::span<const int> rows);

struct RunTracePoint
{
    std::int64_t iteration = 0;
    double nmse = 0.0;
    double residual = 0.0;
    double flops_measured = 0.0;
    double flops_analytic = 0.0;
};

struct RunTrace
{
    std::string scheme;
    std::vector<RunTracePoint> points;
    std::int64_t iterations = 0;  // rounds until the stop fired
    std::int64_t total_steps = 0; // iterations summed over right-hand sides
    bool converged = false;
    double flops_measured = 0.0;
    double flops_analytic = 0.0;
    double sum_rate = 0.0;
    CMatrix F;
};

} // namespace elaa
