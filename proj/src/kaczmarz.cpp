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

#include "elaa/kaczmarz.hpp"

#include "elaa/parallel.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

namespace elaa
{

// ------------------------------------------------------------------------
// Scheme names

namespace
{

constexpr std::array<Scheme, 7> kSchemes = {Scheme::URK, Scheme::SworERK, Scheme::GK,    Scheme::GRK,
                                            Scheme::VrOgrk, Scheme::AHK,  Scheme::VrOahk};

bool iequals(std::string_view a, std::string_view b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

} // namespace

std::string_view scheme_name(Scheme scheme)
{
    switch (scheme)
    {
    case Scheme::URK:
        return "URK";
    case Scheme::SworERK:
        return "SWOR-ERK";
    case Scheme::GK:
        return "GK";
    case Scheme::GRK:
        return "GRK";
    case Scheme::VrOgrk:
        return "VR-OGRK";
    case Scheme::AHK:
        return "AHK";
    case Scheme::VrOahk:
        return "VR-OAHK";
    }
    return "?";
}

Scheme parse_scheme(std::string_view name)
{
    for (Scheme s : kSchemes)
        if (iequals(name, scheme_name(s)))
            return s;
    throw InvalidArgument("unknown scheme '" + std::string(name) + "'");
}

std::span<const Scheme> all_schemes() { return kSchemes; }

bool is_vr_aware(Scheme scheme) { return scheme == Scheme::VrOgrk || scheme == Scheme::VrOahk; }

// ------------------------------------------------------------------------
// Kernels over antenna ranges. Written as plain sequential loops: the dense
// and effective variants then accumulate the same nonzero terms in the same
// order and agree bitwise.

namespace
{

inline cplx conj_dot(const cplx* a, const cplx* b, std::span<const AntennaRange> ranges)
{
    double re = 0.0, im = 0.0;
    for (const auto& r : ranges)
        for (int n = r.begin; n < r.end; ++n)
        {
            const double ar = a[n].real(), ai = a[n].imag();
            const double br = b[n].real(), bi = b[n].imag();
            re += ar * br + ai * bi;
            im += ar * bi - ai * br;
        }
    return {re, im};
}

inline void axpy(cplx alpha, const cplx* x, cplx* y, std::span<const AntennaRange> ranges)
{
    const double pr = alpha.real(), pi = alpha.imag();
    for (const auto& r : ranges)
        for (int n = r.begin; n < r.end; ++n)
        {
            const double xr = x[n].real(), xi = x[n].imag();
            y[n] = {y[n].real() + (pr * xr - pi * xi), y[n].imag() + (pr * xi + pi * xr)};
        }
}

inline double squared_norm(const cplx* x, std::span<const AntennaRange> ranges)
{
    double acc = 0.0;
    for (const auto& r : ranges)
        for (int n = r.begin; n < r.end; ++n)
            acc += x[n].real() * x[n].real() + x[n].imag() * x[n].imag();
    return acc;
}

std::uint64_t range_length(std::span<const AntennaRange> ranges)
{
    std::uint64_t n = 0;
    for (const auto& r : ranges)
        n += static_cast<std::uint64_t>(r.size());
    return n;
}

void mark_stale_around(SolverState& state, const AugmentedSystem& sys, int i)
{
    for (int j : sys.partition().neighbor_sets[static_cast<std::size_t>(i)])
        state.fresh[static_cast<std::size_t>(j)] = 0;
}

void require_fresh(const SolverState& state, int i, const char* who)
{
    if (!state.fresh[static_cast<std::size_t>(i)])
        throw IntegrityError(std::string(who) + ": residual of row " + std::to_string(i) + " is stale");
}

void require_row(const AugmentedSystem& sys, int i, const char* who)
{
    if (i < 0 || i >= sys.n_users())
        throw InvalidArgument(std::string(who) + ": row index out of range");
}

// Antenna ranges covering the union of the supports of `rows`.
std::vector<AntennaRange> union_ranges(const AugmentedSystem& sys, std::span<const int> rows)
{
    const auto& cfg = sys.channel().config();
    std::vector<char> seen(static_cast<std::size_t>(cfg.n_subarrays), 0);
    for (int i : rows)
        for (int s : sys.channel().region(i).subarrays())
            seen[static_cast<std::size_t>(s)] = 1;
    std::vector<AntennaRange> out;
    const int len = cfg.subarray_size();
    for (int s = 0; s < cfg.n_subarrays; ++s)
    {
        if (!seen[static_cast<std::size_t>(s)])
            continue;
        if (!out.empty() && out.back().end == s * len)
            out.back().end += len;
        else
            out.push_back({s * len, (s + 1) * len});
    }
    return out;
}

} // namespace

// ------------------------------------------------------------------------
// AugmentedSystem

AugmentedSystem::AugmentedSystem(ChannelMatrix channel, double xi)
    : channel_(std::move(channel)), xi_(xi), partition_(build_partition(channel_.regions()))
{
    if (!(xi_ > 0.0) || !std::isfinite(xi_))
        throw InvalidArgument("AugmentedSystem: xi must be positive and finite");
    full_range_.push_back({0, channel_.n_antennas()});

    const int K = n_users();
    energies_.resize(K);
    for (int i = 0; i < K; ++i)
        energies_[i] = squared_norm(H().col(i).data(), channel_.region(i).antenna_ranges()) + xi_;

    const auto& O = partition_.orthogonal;
    for (std::size_t a = 0; a < O.size(); ++a)
        for (std::size_t b = a + 1; b < O.size(); ++b)
            if (H().col(O[a]).dot(H().col(O[b])) != cplx{})
                throw IntegrityError("AugmentedSystem: orthogonal-set channels are not orthogonal");
}

std::span<const AntennaRange> AugmentedSystem::ranges(int i, Support support) const
{
    if (support == Support::Dense)
        return full_range_;
    return channel_.region(i).antenna_ranges();
}

// ------------------------------------------------------------------------
// SolverState

SolverState SolverState::initial(const AugmentedSystem& sys, int rhs)
{
    require_row(sys, rhs, "SolverState::initial");
    SolverState st;
    st.rhs = rhs;
    st.m = CVector::Zero(sys.n_antennas());
    st.q = CVector::Zero(sys.n_users());
    st.r = CVector::Zero(sys.n_users());
    st.r[rhs] = 1.0;
    st.fresh.assign(static_cast<std::size_t>(sys.n_users()), 1);
    return st;
}

CVector augmented_iterate(const SolverState& state, const AugmentedSystem& sys)
{
    CVector x(sys.n_antennas() + sys.n_users());
    x.head(sys.n_antennas()) = state.m;
    x.tail(sys.n_users()) = std::sqrt(sys.xi()) * state.q;
    return x;
}

CVector augmented_solution(const AugmentedSystem& sys, const CVector& v)
{
    CVector x(sys.n_antennas() + sys.n_users());
    x.head(sys.n_antennas()) = sys.H() * v;
    x.tail(sys.n_users()) = std::sqrt(sys.xi()) * v;
    return x;
}

double solution_error(const SolverState& state, const AugmentedSystem& sys, const CVector& v)
{
    return (augmented_iterate(state, sys) - augmented_solution(sys, v)).norm();
}

// ------------------------------------------------------------------------
// Row kernels

cplx row_residual(const SolverState& state, const AugmentedSystem& sys, int i, Support support, FlopCounter* flops)
{
    require_row(sys, i, "row_residual");
    const auto ranges = sys.ranges(i, support);
    const cplx hm = conj_dot(sys.H().col(i).data(), state.m.data(), ranges);
    const cplx target = (i == state.rhs) ? cplx{1.0, 0.0} : cplx{};
    if (flops)
    {
        flops->dot(range_length(ranges));
        flops->complex_real();
        flops->complex_add(2);
    }
    return target - hm - sys.xi() * state.q[i];
}

void residual_refresh(SolverState& state, const AugmentedSystem& sys, std::span<const int> rows, Support support,
                      FlopCounter* flops)
{
    for (int i : rows)
    {
        state.r[i] = row_residual(state, sys, i, support, flops);
        state.fresh[static_cast<std::size_t>(i)] = 1;
    }
}

double residual_norm(const SolverState& state, const AugmentedSystem& sys)
{
    CVector r = -(sys.H().adjoint() * state.m) - sys.xi() * state.q;
    r[state.rhs] += 1.0;
    return r.norm();
}

void rk_step(SolverState& state, const AugmentedSystem& sys, int i, Support support, FlopCounter* flops)
{
    require_row(sys, i, "rk_step");
    require_fresh(state, i, "rk_step");
    const cplx gamma = state.r[i] / sys.row_energy(i);
    const auto ranges = sys.ranges(i, support);
    axpy(gamma, sys.H().col(i).data(), state.m.data(), ranges);
    state.q[i] += gamma;
    if (flops)
    {
        flops->complex_real();
        flops->axpy(range_length(ranges));
        flops->complex_add();
    }
    mark_stale_around(state, sys, i);
}

// ------------------------------------------------------------------------
// Row selection

RowSelector::RowSelector(Selection rule, const AugmentedSystem& sys) : rule_(rule), n_rows_(sys.n_users())
{
    if (rule_ == Selection::EnergySWOR)
        refill();
}

void RowSelector::refill()
{
    pool_.resize(static_cast<std::size_t>(n_rows_));
    for (int i = 0; i < n_rows_; ++i)
        pool_[static_cast<std::size_t>(i)] = i;
}

namespace
{

// Index into `weights` drawn proportionally; zero weights are never drawn.
// Returns -1 if all weights are zero.
int draw_weighted(const std::vector<double>& weights, Rng& rng)
{
    double total = 0.0;
    for (double w : weights)
        total += w;
    if (!(total > 0.0))
        return -1;
    std::uniform_real_distribution<double> uni(0.0, total);
    const double u = uni(rng);
    double acc = 0.0;
    int last_positive = -1;
    for (std::size_t i = 0; i < weights.size(); ++i)
    {
        if (weights[i] <= 0.0)
            continue;
        acc += weights[i];
        last_positive = static_cast<int>(i);
        if (u < acc)
            return last_positive;
    }
    return last_positive;
}

} // namespace

std::optional<int> RowSelector::select(const SolverState& state, const AugmentedSystem& sys, Rng& rng,
                                       FlopCounter* flops)
{
    const int K = n_rows_;
    switch (rule_)
    {
    case Selection::Uniform: {
        std::uniform_int_distribution<int> uni(0, K - 1);
        return uni(rng);
    }
    case Selection::Energy: {
        std::vector<double> w(sys.row_energies().data(), sys.row_energies().data() + K);
        if (flops)
            flops->real(static_cast<std::uint64_t>(K));
        return draw_weighted(w, rng);
    }
    case Selection::EnergySWOR: {
        if (pool_.empty())
            refill();
        std::vector<double> w(pool_.size());
        for (std::size_t j = 0; j < pool_.size(); ++j)
            w[j] = sys.row_energy(pool_[j]);
        if (flops)
            flops->real(pool_.size());
        const int pick = draw_weighted(w, rng);
        const int row = pool_[static_cast<std::size_t>(pick)];
        pool_.erase(pool_.begin() + pick);
        return row;
    }
    case Selection::GreedyMax:
    case Selection::GreedyWeighted: {
        for (int i = 0; i < K; ++i)
            require_fresh(state, i, "RowSelector::select");
        if (flops)
        {
            flops->abs2(static_cast<std::uint64_t>(K));
            flops->real(static_cast<std::uint64_t>(K));
        }
        if (rule_ == Selection::GreedyMax)
        {
            int best = -1;
            double best_score = 0.0;
            for (int i = 0; i < K; ++i)
            {
                const double score = std::norm(state.r[i]) / sys.row_energy(i);
                if (score > best_score)
                {
                    best = i;
                    best_score = score;
                }
            }
            if (best < 0)
                return std::nullopt;
            return best;
        }
        std::vector<double> w(static_cast<std::size_t>(K));
        for (int i = 0; i < K; ++i)
            w[static_cast<std::size_t>(i)] = std::norm(state.r[i]);
        const int pick = draw_weighted(w, rng);
        if (pick < 0)
            return std::nullopt;
        return pick;
    }
    }
    return std::nullopt;
}

std::vector<double> RowSelector::probabilities(const SolverState& state, const AugmentedSystem& sys) const
{
    const int K = n_rows_;
    std::vector<double> p(static_cast<std::size_t>(K), 0.0);
    auto normalize = [&p] {
        double total = 0.0;
        for (double v : p)
            total += v;
        if (total > 0.0)
            for (double& v : p)
                v /= total;
    };
    switch (rule_)
    {
    case Selection::Uniform:
        std::fill(p.begin(), p.end(), 1.0 / K);
        break;
    case Selection::Energy:
        for (int i = 0; i < K; ++i)
            p[static_cast<std::size_t>(i)] = sys.row_energy(i);
        normalize();
        break;
    case Selection::EnergySWOR: {
        if (pool_.empty())
        {
            for (int i = 0; i < K; ++i)
                p[static_cast<std::size_t>(i)] = sys.row_energy(i);
        }
        else
        {
            for (int i : pool_)
                p[static_cast<std::size_t>(i)] = sys.row_energy(i);
        }
        normalize();
        break;
    }
    case Selection::GreedyMax: {
        int best = -1;
        double best_score = 0.0;
        for (int i = 0; i < K; ++i)
        {
            const double score = std::norm(state.r[i]) / sys.row_energy(i);
            if (score > best_score)
            {
                best = i;
                best_score = score;
            }
        }
        if (best >= 0)
            p[static_cast<std::size_t>(best)] = 1.0;
        break;
    }
    case Selection::GreedyWeighted:
        for (int i = 0; i < K; ++i)
            p[static_cast<std::size_t>(i)] = std::norm(state.r[i]);
        normalize();
        break;
    }
    return p;
}

// ------------------------------------------------------------------------
// Aggregated projections

AggregationWeights aggregation_weights(const SolverState& state, const AugmentedSystem& sys,
                                       std::span<const int> rows, FlopCounter* flops)
{
    AggregationWeights w;
    w.phi = CVector::Zero(sys.n_users());
    w.rows.assign(rows.begin(), rows.end());
    for (int i : rows)
    {
        require_row(sys, i, "aggregation_weights");
        require_fresh(state, i, "aggregation_weights");
        w.phi[i] = state.r[i] / sys.row_energy(i);
    }
    if (flops)
        flops->complex_real(rows.size());
    return w;
}

AggregationStep ahk_step(SolverState& state, const AugmentedSystem& sys, const AggregationWeights& weights,
                         Support support, FlopCounter* flops)
{
    AggregationStep out;
    if (weights.rows.empty())
        return out;

    // phi^H r over the support.
    double num_re = 0.0, num_im = 0.0;
    double phi_norm2 = 0.0;
    for (int i : weights.rows)
    {
        require_row(sys, i, "ahk_step");
        require_fresh(state, i, "ahk_step");
        const cplx p = weights.phi[i];
        const cplx r = state.r[i];
        num_re += p.real() * r.real() + p.imag() * r.imag();
        num_im += p.real() * r.imag() - p.imag() * r.real();
        phi_norm2 += std::norm(p);
    }

    // y = H phi, accumulated over each row's ranges.
    const std::vector<AntennaRange> dense_range{{0, sys.n_antennas()}};
    const std::vector<AntennaRange> touched =
        support == Support::Dense ? dense_range : union_ranges(sys, weights.rows);
    CVector y = CVector::Zero(sys.n_antennas());
    std::uint64_t axpy_len = 0;
    for (int i : weights.rows)
    {
        const auto ranges = sys.ranges(i, support);
        axpy(weights.phi[i], sys.H().col(i).data(), y.data(), ranges);
        axpy_len += range_length(ranges);
    }
    const double y_norm2 = squared_norm(y.data(), touched);
    const double denom = y_norm2 + sys.xi() * phi_norm2;

    const std::uint64_t nrows = weights.rows.size();
    const std::uint64_t nt = range_length(touched);
    if (flops)
    {
        flops->dot(nrows);
        flops->axpy(axpy_len);
        flops->abs2(nt + nrows);
        flops->real(nt + nrows + 1);
    }

    if (!(denom > 0.0))
        return out;

    out.gamma = cplx{num_re, num_im} / denom;
    out.applied = true;
    axpy(out.gamma, y.data(), state.m.data(), touched);
    for (int i : weights.rows)
        state.q[i] += out.gamma * weights.phi[i];
    if (flops)
    {
        flops->complex_real();
        flops->axpy(nt);
        flops->axpy(nrows);
    }
    for (int i : weights.rows)
        mark_stale_around(state, sys, i);
    return out;
}

void orthogonal_block_step(SolverState& state, const AugmentedSystem& sys, std::span<const int> rows,
                           Support support, FlopCounter* flops)
{
    // Weights first: each uses the residual of the pre-step iterate.
    std::vector<cplx> phi(rows.size());
    for (std::size_t a = 0; a < rows.size(); ++a)
    {
        const int i = rows[a];
        require_row(sys, i, "orthogonal_block_step");
        require_fresh(state, i, "orthogonal_block_step");
        phi[a] = state.r[i] / sys.row_energy(i);
    }
    for (std::size_t a = 0; a < rows.size(); ++a)
    {
        const int i = rows[a];
        const auto ranges = sys.ranges(i, support);
        axpy(phi[a], sys.H().col(i).data(), state.m.data(), ranges);
        state.q[i] += phi[a];
        if (flops)
        {
            flops->complex_real();
            flops->axpy(range_length(ranges));
            flops->complex_add();
        }
    }
    for (int i : rows)
        mark_stale_around(state, sys, i);
}

// ------------------------------------------------------------------------
// RhsSolver

namespace
{

Selection selection_for(Scheme scheme)
{
    switch (scheme)
    {
    case Scheme::URK:
        return Selection::Uniform;
    case Scheme::SworERK:
        return Selection::EnergySWOR;
    case Scheme::GK:
        return Selection::GreedyMax;
    case Scheme::GRK:
    case Scheme::VrOgrk:
        return Selection::GreedyWeighted;
    case Scheme::AHK:
    case Scheme::VrOahk:
        break;
    }
    return Selection::Uniform; // unused by the aggregation schemes
}

} // namespace

RhsSolver::RhsSolver(Scheme scheme, const AugmentedSystem& sys, int rhs, Rng rng)
    : scheme_(scheme), sys_(&sys), state_(SolverState::initial(sys, rhs)), selector_(selection_for(scheme), sys),
      rng_(std::move(rng))
{
    all_rows_.resize(static_cast<std::size_t>(sys.n_users()));
    for (int i = 0; i < sys.n_users(); ++i)
        all_rows_[static_cast<std::size_t>(i)] = i;
}

void RhsSolver::refresh_all(Support support)
{
    residual_refresh(state_, *sys_, all_rows_, support, &flops_);
}

void RhsSolver::refresh_stale(Support support)
{
    for (int i = 0; i < sys_->n_users(); ++i)
        if (!state_.fresh[static_cast<std::size_t>(i)])
        {
            const int row[1] = {i};
            residual_refresh(state_, *sys_, row, support, &flops_);
        }
}

bool RhsSolver::step()
{
    if (exhausted_)
        return false;
    const AugmentedSystem& sys = *sys_;
    const auto& part = sys.partition();

    switch (scheme_)
    {
    case Scheme::URK:
    case Scheme::SworERK: {
        const int i = *selector_.select(state_, sys, rng_, &flops_);
        const int row[1] = {i};
        residual_refresh(state_, sys, row, Support::Dense, &flops_);
        rk_step(state_, sys, i, Support::Dense, &flops_);
        break;
    }
    case Scheme::GK:
    case Scheme::GRK:
    case Scheme::VrOgrk: {
        const Support support = scheme_ == Scheme::VrOgrk ? Support::Effective : Support::Dense;
        if (scheme_ == Scheme::VrOgrk)
            refresh_stale(support);
        else if (state_.iterations > 0)
            refresh_all(support);
        const auto i = selector_.select(state_, sys, rng_, &flops_);
        if (!i)
        {
            exhausted_ = true;
            return false;
        }
        rk_step(state_, sys, *i, support, &flops_);
        break;
    }
    case Scheme::AHK: {
        if (state_.iterations > 0)
            refresh_all(Support::Dense);
        const auto w = aggregation_weights(state_, sys, all_rows_, &flops_);
        if (!ahk_step(state_, sys, w, Support::Dense, &flops_).applied)
        {
            exhausted_ = true;
            return false;
        }
        break;
    }
    case Scheme::VrOahk: {
        refresh_stale(Support::Effective);
        bool moved = false;
        for (int i : part.orthogonal)
            moved = moved || state_.r[i] != cplx{};
        orthogonal_block_step(state_, sys, part.orthogonal, Support::Effective, &flops_);
        if (!part.non_orthogonal.empty())
        {
            residual_refresh(state_, sys, part.non_orthogonal, Support::Effective, &flops_);
            const auto w = aggregation_weights(state_, sys, part.non_orthogonal, &flops_);
            moved = ahk_step(state_, sys, w, Support::Effective, &flops_).applied || moved;
        }
        if (!moved)
        {
            exhausted_ = true;
            return false;
        }
        break;
    }
    }
    ++state_.iterations;
    return true;
}

// ------------------------------------------------------------------------
// Drivers

StoppingRule StoppingRule::residual(double tolerance, std::int64_t max_iterations)
{
    StoppingRule s;
    s.mode = Mode::Residual;
    s.tolerance = tolerance;
    s.max_iterations = max_iterations;
    return s;
}

StoppingRule StoppingRule::oracle(CVector v, double tolerance, std::int64_t max_iterations)
{
    StoppingRule s;
    s.mode = Mode::Oracle;
    s.tolerance = tolerance;
    s.max_iterations = max_iterations;
    s.reference = std::move(v);
    return s;
}

StoppingRule StoppingRule::fixed(std::int64_t iterations)
{
    StoppingRule s;
    s.mode = Mode::FixedIterations;
    s.max_iterations = iterations;
    return s;
}

namespace
{

std::int64_t iteration_cap(std::int64_t requested, const AugmentedSystem& sys)
{
    return requested > 0 ? requested : 10000 * static_cast<std::int64_t>(sys.n_users());
}

} // namespace

SolveResult solve(Scheme scheme, const AugmentedSystem& sys, int rhs, const StoppingRule& stop, Rng rng)
{
    if (stop.mode == StoppingRule::Mode::Oracle && stop.reference.size() != sys.n_users())
        throw InvalidArgument("solve: oracle stopping needs a reference of length K");
    if (stop.mode == StoppingRule::Mode::FixedIterations && stop.max_iterations < 0)
        throw InvalidArgument("solve: negative iteration count");

    RhsSolver solver(scheme, sys, rhs, std::move(rng));
    const std::int64_t cap = stop.mode == StoppingRule::Mode::FixedIterations
                                 ? stop.max_iterations
                                 : iteration_cap(stop.max_iterations, sys);
    const CVector ref_f = stop.mode == StoppingRule::Mode::Oracle ? CVector(sys.H() * stop.reference) : CVector();
    const double ref_norm = ref_f.size() ? ref_f.norm() : 1.0;

    SolveResult out;
    auto record = [&] {
        TracePoint p;
        p.iteration = solver.state().iterations;
        p.residual = residual_norm(solver.state(), sys);
        p.error = stop.mode == StoppingRule::Mode::Oracle
                      ? (sys.H() * solver.state().q - ref_f).norm() / ref_norm
                      : std::numeric_limits<double>::quiet_NaN();
        p.flops = solver.flops().total();
        out.trace.push_back(p);
        return p;
    };
    auto satisfied = [&](const TracePoint& p) {
        switch (stop.mode)
        {
        case StoppingRule::Mode::Residual:
            return p.residual <= stop.tolerance;
        case StoppingRule::Mode::Oracle:
            return p.error <= stop.tolerance;
        case StoppingRule::Mode::FixedIterations:
            return p.iteration >= cap;
        }
        return false;
    };

    TracePoint p = record();
    for (;;)
    {
        if (satisfied(p))
        {
            out.converged = true;
            break;
        }
        if (solver.state().iterations >= cap)
            break;
        if (!solver.step())
        {
            // Exactly zero residual: the iterate is the solution.
            out.converged = true;
            break;
        }
        p = record();
    }
    out.state = solver.state();
    out.flops = solver.flops();
    return out;
}

SolveAllResult solve_all(Scheme scheme, const AugmentedSystem& sys, const StoppingRule& stop, std::uint64_t seed,
                         int workers)
{
    const int K = sys.n_users();
    if (stop.mode == StoppingRule::Mode::Oracle)
        throw InvalidArgument("solve_all: oracle stopping needs one reference per right-hand side; use solve");
    SolveAllResult out;
    out.runs.resize(static_cast<std::size_t>(K));
    parallel_for(K, workers > 0 ? workers : default_workers(), [&](int k) {
        out.runs[static_cast<std::size_t>(k)] =
            solve(scheme, sys, k, stop, make_stream(seed, static_cast<std::uint64_t>(k)));
    });
    out.V.resize(K, K);
    out.converged = true;
    for (int k = 0; k < K; ++k)
    {
        const auto& run = out.runs[static_cast<std::size_t>(k)];
        out.V.col(k) = run.state.q;
        out.converged = out.converged && run.converged;
        out.flops += run.flops;
    }
    return out;
}

LockstepResult solve_lockstep(Scheme scheme, const AugmentedSystem& sys, const LockstepOptions& options,
                              std::uint64_t seed, const MatrixMetric& metric)
{
    const int K = sys.n_users();
    std::vector<RhsSolver> solvers;
    solvers.reserve(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k)
        solvers.emplace_back(scheme, sys, k, make_stream(seed, static_cast<std::uint64_t>(k)));

    const bool fixed = options.fixed_iterations > 0;
    const std::int64_t cap = fixed ? options.fixed_iterations : iteration_cap(options.max_iterations, sys);

    LockstepResult out;
    out.V = CMatrix::Zero(K, K);
    auto snapshot = [&](std::int64_t t) {
        LockstepPoint p;
        p.iteration = t;
        std::uint64_t flops = 0;
        double resid = 0.0;
        for (int k = 0; k < K; ++k)
        {
            const auto& s = solvers[static_cast<std::size_t>(k)];
            out.V.col(k) = s.state().q;
            flops += s.flops().total();
            p.total_steps += s.state().iterations;
            resid = std::max(resid, residual_norm(s.state(), sys));
        }
        p.flops = flops;
        p.residual = resid;
        p.metric = metric ? metric(out.V) : std::numeric_limits<double>::quiet_NaN();
        out.trace.push_back(p);
        return p;
    };

    LockstepPoint p = snapshot(0);
    std::int64_t t = 0;
    for (;;)
    {
        if (!fixed && metric && p.metric < options.tolerance)
        {
            out.converged = true;
            break;
        }
        if (t >= cap)
        {
            out.converged = fixed;
            break;
        }
        bool any = false;
        for (auto& s : solvers)
            any = s.step() || any;
        if (!any)
        {
            out.converged = true;
            break;
        }
        ++t;
        p = snapshot(t);
    }
    out.iterations = t;
    for (const auto& s : solvers)
    {
        out.total_steps += s.state().iterations;
        out.flops += s.flops();
    }
    return out;
}

int default_workers()
{
    if (const char* env = std::getenv("ELAA_WORKERS"))
    {
        const int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    return 1;
}

} // namespace elaa
