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

// Kaczmarz-type solvers for the regularized zero-forcing auxiliary system.
//
// The precoder F = beta H (H^H H + xi I)^{-1} is obtained column by column.
// For right-hand side s = e_k the row system
//
//     A x = s,   A = G^H = [H^H, sqrt(xi) I],   x = w = [m; sqrt(xi) q]
//
// is consistent, and the iterate's tail q converges to v_k, the k-th column
// of (H^H H + xi I)^{-1}. Row i of A is a_i^H = [h_i^H, sqrt(xi) e_i^T] with
// energy e_i = ||h_i||^2 + xi, and its residual is
//
//     r_i = [s]_i - h_i^H m - xi q_i.
//
// Rows whose users have disjoint visibility regions are orthogonal, so a step
// on row i only changes the residuals of the users overlapping user i. The
// VR-aware schemes exploit that and restrict every inner product to the
// antenna support of the user involved.

#pragma once

#include "elaa/channel_model.hpp"
#include "elaa/flops.hpp"
#include "elaa/vr_graph.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace elaa
{

enum class Scheme
{
    URK,     // uniform row sampling
    SworERK, // energy-weighted sampling without replacement, epochs of K draws
    GK,      // greedy: deterministic max |r_i|^2 / e_i, full residual refresh
    GRK,     // greedy randomized: p_i = |r_i|^2 / ||r||^2, full residual refresh
    VrOgrk,  // GRK with overlap-restricted residual refresh on effective channels
    AHK,     // aggregation-hyperplane projection over all rows
    VrOahk,  // orthogonal-set block projection followed by AHK on the rest
};

std::string_view scheme_name(Scheme scheme);
// Accepts the names returned by scheme_name (case-insensitive). Throws
// InvalidArgument on an unknown name.
Scheme parse_scheme(std::string_view name);
std::span<const Scheme> all_schemes();

// Whether a scheme uses visibility-restricted kernels and VR assembly.
bool is_vr_aware(Scheme scheme);

// Kernel access pattern. Dense kernels sweep all N_t entries of a channel
// column; Effective kernels sweep only the user's antenna support.
enum class Support
{
    Dense,
    Effective
};

// Immutable description of the row system, shareable across right-hand sides.
class AugmentedSystem
{
  public:
    // Throws InvalidArgument unless xi > 0, and IntegrityError if the users
    // chosen as orthogonal do not have exactly orthogonal channels.
    AugmentedSystem(ChannelMatrix channel, double xi);

    const ChannelMatrix& channel() const { return channel_; }
    const CMatrix& H() const { return channel_.entries(); }
    double xi() const { return xi_; }
    int n_users() const { return channel_.n_users(); }
    int n_antennas() const { return channel_.n_antennas(); }

    double row_energy(int i) const { return energies_[i]; }
    const RVector& row_energies() const { return energies_; }

    // Antenna ranges touched by row i under the given access pattern.
    std::span<const AntennaRange> ranges(int i, Support support) const;
    int support_size(int i) const { return channel_.region(i).antenna_count(); }

    const UserPartition& partition() const { return partition_; }

  private:
    ChannelMatrix channel_;
    double xi_;
    RVector energies_;
    UserPartition partition_;
    std::vector<AntennaRange> full_range_;
};

// Iterate for one right-hand side e_rhs.
//
// Invariant: every row marked fresh has r[i] equal to its exact residual;
// a row goes stale only when a step touched a user overlapping it.
struct SolverState
{
    int rhs = 0;
    CVector m;               // N_t, accumulates sum gamma * h_i
    CVector q;               // K, converges to v_rhs
    CVector r;               // K, row residuals
    std::vector<char> fresh; // per-row freshness of r
    std::int64_t iterations = 0;

    // Zero iterate; residual e_rhs, all rows fresh.
    static SolverState initial(const AugmentedSystem& sys, int rhs);
};

// Stacked iterate x = [m; sqrt(xi) q] and its exact solution [H v; sqrt(xi) v].
CVector augmented_iterate(const SolverState& state, const AugmentedSystem& sys);
CVector augmented_solution(const AugmentedSystem& sys, const CVector& v);
// ||x - x*||_2 for the exact auxiliary vector v.
double solution_error(const SolverState& state, const AugmentedSystem& sys, const CVector& v);

// Exact residual of row i, computed (and charged) with the given pattern.
cplx row_residual(const SolverState& state, const AugmentedSystem& sys, int i, Support support,
                  FlopCounter* flops = nullptr);

// Recomputes r_i for i in rows and marks them fresh; other rows untouched.
void residual_refresh(SolverState& state, const AugmentedSystem& sys, std::span<const int> rows, Support support,
                      FlopCounter* flops = nullptr);

// Dense diagnostic ||s - A x||_2 over all rows, never charged.
double residual_norm(const SolverState& state, const AugmentedSystem& sys);

// Projection onto row i: gamma = r_i / e_i, m += gamma h_i, q_i += gamma.
// Requires a fresh r_i (throws IntegrityError otherwise); afterwards the rows
// overlapping user i are stale. Does not advance the iteration counter.
void rk_step(SolverState& state, const AugmentedSystem& sys, int i, Support support, FlopCounter* flops = nullptr);

enum class Selection
{
    Uniform,
    Energy,
    EnergySWOR,
    GreedyMax,
    GreedyWeighted
};

// Row selection strategy with its per-run state (the SWOR pool).
class RowSelector
{
  public:
    RowSelector(Selection rule, const AugmentedSystem& sys);

    Selection rule() const { return rule_; }

    // Greedy rules need fresh residuals on every row (IntegrityError otherwise)
    // and return nullopt when the residual is exactly zero.
    std::optional<int> select(const SolverState& state, const AugmentedSystem& sys, Rng& rng,
                              FlopCounter* flops = nullptr);

    // Distribution the next draw uses (GreedyMax: one-hot at the arg max).
    std::vector<double> probabilities(const SolverState& state, const AugmentedSystem& sys) const;

    // Rows left in the current SWOR epoch.
    const std::vector<int>& pool() const { return pool_; }

  private:
    void refill();

    Selection rule_;
    int n_rows_;
    std::vector<int> pool_;
};

struct AggregationWeights
{
    CVector phi;              // length K, zero outside `rows`
    std::vector<int> rows;    // support of phi
};

// phi_i = r_i / e_i on `rows` (fresh residuals required).
AggregationWeights aggregation_weights(const SolverState& state, const AugmentedSystem& sys,
                                       std::span<const int> rows, FlopCounter* flops = nullptr);

struct AggregationStep
{
    cplx gamma{};
    bool applied = false; // false when the aggregate direction vanished
};

// Projection onto the aggregation hyperplane phi^H A x = phi^H s:
//   gamma = phi^H r / (||H phi||^2 + xi ||phi||^2),
//   m += gamma H phi,   q += gamma phi.
// Residuals of the support rows must be fresh. Rows overlapping the support
// go stale.
AggregationStep ahk_step(SolverState& state, const AugmentedSystem& sys, const AggregationWeights& weights,
                         Support support, FlopCounter* flops = nullptr);

// Simultaneous projection onto the hyperplanes of the pairwise orthogonal rows
// in `rows`: m += sum phi_i h_i, q_i += phi_i with phi_i = r_i / e_i. The
// per-row updates touch disjoint antenna ranges and commute.
void orthogonal_block_step(SolverState& state, const AugmentedSystem& sys, std::span<const int> rows,
                           Support support, FlopCounter* flops = nullptr);

// One right-hand side driven by a scheme. An iteration is one selection and
// projection for the row-action schemes, one aggregated projection for AHK
// and one (orthogonal block, non-orthogonal aggregate) pair for VR-OAHK.
class RhsSolver
{
  public:
    RhsSolver(Scheme scheme, const AugmentedSystem& sys, int rhs, Rng rng);

    // Performs one iteration. Returns false, leaving the state untouched, when
    // the scheme finds its residuals exactly zero.
    bool step();

    Scheme scheme() const { return scheme_; }
    const SolverState& state() const { return state_; }
    const FlopCounter& flops() const { return flops_; }
    bool exhausted() const { return exhausted_; }

  private:
    void refresh_all(Support support);
    void refresh_stale(Support support);

    Scheme scheme_;
    const AugmentedSystem* sys_;
    SolverState state_;
    RowSelector selector_;
    Rng rng_;
    FlopCounter flops_;
    std::vector<int> all_rows_;
    bool exhausted_ = false;
};

// Stopping rules for a single right-hand side.
struct StoppingRule
{
    enum class Mode
    {
        Residual,       // ||s - A x|| / ||s|| <= tolerance
        Oracle,         // ||H (q - v)|| / ||H v|| <= tolerance, v supplied
        FixedIterations // run exactly max_iterations
    };

    Mode mode = Mode::Residual;
    double tolerance = 1e-6;
    std::int64_t max_iterations = 0; // 0: 10^4 * K
    CVector reference;               // v for Mode::Oracle

    static StoppingRule residual(double tolerance = 1e-6, std::int64_t max_iterations = 0);
    static StoppingRule oracle(CVector v, double tolerance = 1e-6, std::int64_t max_iterations = 0);
    static StoppingRule fixed(std::int64_t iterations);
};

struct TracePoint
{
    std::int64_t iteration = 0;
    double residual = 0.0; // relative residual, dense diagnostic
    double error = 0.0;    // Oracle mode metric, NaN otherwise
    std::uint64_t flops = 0;
};

struct SolveResult
{
    SolverState state;
    bool converged = false;
    std::vector<TracePoint> trace; // entry 0 is the initial state
    FlopCounter flops;
};

SolveResult solve(Scheme scheme, const AugmentedSystem& sys, int rhs, const StoppingRule& stop, Rng rng);

struct SolveAllResult
{
    CMatrix V; // K x K, column k from right-hand side e_k
    std::vector<SolveResult> runs;
    bool converged = false;
    FlopCounter flops;
};

// Runs every right-hand side independently (stream k of `seed` drives rhs k)
// over a worker pool; the result does not depend on the worker count.
SolveAllResult solve_all(Scheme scheme, const AugmentedSystem& sys, const StoppingRule& stop, std::uint64_t seed,
                         int workers = 0);

// All K right-hand sides advanced together, one iteration each per round,
// with a whole-matrix metric checked after every round. This is the
// evaluation mode of the precoding loops: `metric(V)` is typically the NMSE
// of the assembled precoder against the direct oracle.
struct LockstepOptions
{
    double tolerance = 1e-6;
    std::int64_t max_iterations = 0;   // 0: 10^4 * K
    std::int64_t fixed_iterations = 0; // > 0: ignore tolerance, run exactly this many
};

struct LockstepPoint
{
    std::int64_t iteration = 0;
    double metric = 0.0;
    double residual = 0.0; // max relative residual across right-hand sides
    std::uint64_t flops = 0;
    std::int64_t total_steps = 0;
};

struct LockstepResult
{
    CMatrix V;
    std::int64_t iterations = 0;  // rounds performed
    std::int64_t total_steps = 0; // iterations summed over right-hand sides
    bool converged = false;
    std::vector<LockstepPoint> trace;
    FlopCounter flops;
};

using MatrixMetric = std::function<double(const CMatrix& V)>;

LockstepResult solve_lockstep(Scheme scheme, const AugmentedSystem& sys, const LockstepOptions& options,
                              std::uint64_t seed, const MatrixMetric& metric);

// Worker count from ELAA_WORKERS, default 1.
int default_workers();

} // namespace elaa
