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

// Acceptance harness: one PASS/FAIL line per criterion. With an argument,
// runs only the named criterion; the exit status is nonzero if any selected
// criterion fails.

#include "elaa/experiment.hpp"
#include "elaa/metrics.hpp"
#include "elaa/parallel.hpp"
#include "elaa/precode_assembly.hpp"
#include "elaa/rzf_oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

using namespace elaa;

namespace
{

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

AugmentedSystem instance(int nt, int k, int s, double p, double snr_db, std::uint64_t seed, int paths = 5)
{
    ScenarioParams sp;
    sp.n_users = k;
    sp.n_paths = paths;
    sp.visibility_p = p;
    Rng rng = make_stream(seed, 0);
    auto pc = power_control(generate_channel(ArrayConfig{nt, 100e9, s}, sp, rng), snr_db);
    return AugmentedSystem(std::move(pc.channel), pc.xi);
}

std::vector<int> iota_rows(int k)
{
    std::vector<int> v(static_cast<std::size_t>(k));
    std::iota(v.begin(), v.end(), 0);
    return v;
}

int pool_size() { return std::max(1u, std::thread::hardware_concurrency()); }

ExperimentConfig small_config()
{
    ExperimentConfig c = ExperimentConfig::desk();
    c.n_antennas = 64;
    c.n_users = 8;
    c.n_subarrays = 8;
    c.visibility_p = 0.5;
    c.snr_db = 0.0;
    c.epsilon = 1e-6;
    return c;
}

Outcome oracle_equivalence()
{
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentConfig cfg = small_config();
    const int n = 100;
    std::vector<double> worst(n, 0.0);
    std::vector<int> failures(n, 0);
    parallel_for(n, pool_size(), [&](int j) {
        const Instance inst = make_instance(cfg, static_cast<std::uint64_t>(j + 1), 0.0);
        for (Scheme s : all_schemes())
        {
            const RunTrace tr = run_scheme(cfg, inst, s, 0, false);
            const double e = nmse(tr.F, inst.f_rzf);
            worst[static_cast<std::size_t>(j)] = std::max(worst[static_cast<std::size_t>(j)], e);
            failures[static_cast<std::size_t>(j)] += !(tr.converged && e <= 1e-6);
        }
    });
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double w = *std::max_element(worst.begin(), worst.end());
    const int f = std::accumulate(failures.begin(), failures.end(), 0);
    return {f == 0 && secs < 60.0, std::to_string(n) + " instances x " + std::to_string(all_schemes().size()) +
                                       " schemes, max NMSE " + fmt("%.3e", w) + ", " + std::to_string(f) +
                                       " failures, " + fmt("%.2f", secs) + " s"};
}

Outcome optimality_condition()
{
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed)
    {
        const auto sys = instance(64, 8, 8, 0.5, 0.0, seed);
        const int N = sys.n_antennas(), K = sys.n_users();
        const double sx = std::sqrt(sys.xi());
        CMatrix G(N + K, K);
        G.topRows(N) = sys.H();
        G.bottomRows(K) = sx * CMatrix::Identity(K, K);
        Rng rng(seed);
        std::normal_distribution<double> nd;
        std::vector<CVector> rhs;
        for (int k = 0; k < K; ++k)
            rhs.push_back(CVector::Unit(K, k));
        CVector s(K);
        for (int k = 0; k < K; ++k)
            s[k] = cplx(nd(rng), nd(rng));
        rhs.push_back(s);
        for (const CVector& si : rhs)
        {
            CVector g = CVector::Zero(N + K);
            g.tail(K) = si / sx;
            const CVector v = apply_auxiliary(sys.H(), sys.xi(), si);
            const CVector grad = 2.0 * (G.adjoint() * (G * v)) - 2.0 * (G.adjoint() * g);
            worst = std::max(worst, grad.norm() / si.norm());
        }
    }
    return {worst <= 1e-10, "max ||grad|| / ||s|| = " + fmt("%.3e", worst) + " over 100 instances"};
}

Outcome disjoint_residuals_unchanged()
{
    double worst = 0.0;
    long pairs = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
    {
        const auto sys = instance(256, 16, 16, 0.35, 0.0, seed);
        const int K = sys.n_users();
        const auto rows = iota_rows(K);
        for (int k = 0; k < K; k += 5)
        {
            SolverState st = SolverState::initial(sys, k);
            Rng rng(seed * 31 + static_cast<std::uint64_t>(k));
            // Move off the origin so every residual is generic.
            for (int t = 0; t < 2 * K; ++t)
            {
                residual_refresh(st, sys, rows, Support::Dense);
                rk_step(st, sys, static_cast<int>(rng() % static_cast<std::uint64_t>(K)), Support::Dense);
            }
            residual_refresh(st, sys, rows, Support::Dense);
            for (int i = 0; i < K; ++i)
            {
                SolverState after = st;
                rk_step(after, sys, i, Support::Effective);
                for (int j = 0; j < K; ++j)
                {
                    if (sys.channel().region(i).overlaps(sys.channel().region(j)))
                        continue;
                    const cplx before = st.r[j];
                    const cplx now = row_residual(after, sys, j, Support::Dense);
                    const double scale = std::max(std::abs(before), 1.0);
                    worst = std::max(worst, std::abs(now - before) / scale);
                    ++pairs;
                }
            }
        }
    }
    return {worst <= 1e-12 && pairs > 0,
            std::to_string(pairs) + " disjoint (step, row) pairs, max relative change " + fmt("%.3e", worst)};
}

Outcome disjoint_channels_orthogonal()
{
    long disjoint = 0, exact = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed)
    {
        const auto sys = instance(256, 16, 16, 0.35, 0.0, seed);
        const CMatrix& H = sys.H();
        for (int i = 0; i < sys.n_users(); ++i)
            for (int j = i + 1; j < sys.n_users(); ++j)
                if (!sys.channel().region(i).overlaps(sys.channel().region(j)))
                {
                    ++disjoint;
                    exact += H.col(i).dot(H.col(j)) == cplx(0.0, 0.0);
                }
    }
    return {disjoint > 0 && exact == disjoint,
            std::to_string(exact) + " of " + std::to_string(disjoint) + " disjoint pairs exactly orthogonal"};
}

// One VR-OAHK iteration spelled out with the kernels so the half step can be
// inspected. `check` sees the state right after the orthogonal block step.
template <typename Check>
bool oahk_iteration(SolverState& st, const AugmentedSystem& sys, Check&& check)
{
    const auto& part = sys.partition();
    const auto rows = iota_rows(sys.n_users());
    residual_refresh(st, sys, part.orthogonal, Support::Effective);
    orthogonal_block_step(st, sys, part.orthogonal, Support::Effective);
    check(st);
    if (part.non_orthogonal.empty())
        return false;
    residual_refresh(st, sys, part.non_orthogonal, Support::Effective);
    const auto w = aggregation_weights(st, sys, part.non_orthogonal);
    return ahk_step(st, sys, w, Support::Effective).applied;
}

Outcome orthogonal_block_exact()
{
    double worst = 0.0;
    long steps = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
    {
        const auto sys = instance(256, 16, 16, 0.35, 0.0, seed);
        for (int k = 0; k < sys.n_users(); ++k)
        {
            SolverState st = SolverState::initial(sys, k);
            for (int t = 0; t < 30; ++t)
            {
                const bool moved = oahk_iteration(st, sys, [&](const SolverState& s) {
                    for (int i : sys.partition().orthogonal)
                        worst = std::max(worst, std::abs(row_residual(s, sys, i, Support::Dense)));
                    ++steps;
                });
                if (!moved)
                    break;
            }
        }
    }
    return {worst <= 1e-10, std::to_string(steps) + " block steps, max |b_i - a_i^H x| over O = " + fmt("%.3e", worst)};
}

Outcome block_equals_aggregate()
{
    double worst = 0.0;
    int used = 0;
    for (std::uint64_t seed = 1; used < 50; ++seed)
    {
        const auto sys = instance(256, 16, 16, 0.35, 0.0, seed);
        const auto& O = sys.partition().orthogonal;
        if (O.size() < 2)
            continue;
        ++used;
        const auto rows = iota_rows(sys.n_users());
        SolverState a = SolverState::initial(sys, static_cast<int>(seed % 16));
        Rng rng(seed);
        for (int t = 0; t < 10; ++t)
        {
            residual_refresh(a, sys, rows, Support::Dense);
            rk_step(a, sys, static_cast<int>(rng() % 16), Support::Dense);
        }
        residual_refresh(a, sys, rows, Support::Dense);
        SolverState b = a;
        orthogonal_block_step(a, sys, O, Support::Effective);
        ahk_step(b, sys, aggregation_weights(b, sys, O), Support::Dense);
        const CVector xa = augmented_iterate(a, sys), xb = augmented_iterate(b, sys);
        worst = std::max(worst, (xa - xb).cwiseAbs().maxCoeff() / std::max(xb.cwiseAbs().maxCoeff(), 1e-300));
    }
    return {worst <= 1e-12, "50 instances, max entrywise relative gap " + fmt("%.3e", worst)};
}

Outcome monotone_error()
{
    double worst = -1.0;
    long iterations = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
    {
        const auto sys = instance(64, 8, 8, 0.5, 0.0, seed);
        const CMatrix V = auxiliary_matrix(sys.H(), sys.xi());
        for (Scheme s : all_schemes())
            for (int k = 0; k < sys.n_users(); ++k)
            {
                RhsSolver solver(s, sys, k, make_stream(seed, static_cast<std::uint64_t>(k) + 100));
                double prev = solution_error(solver.state(), sys, V.col(k));
                for (int t = 0; t < 2000 && prev > 1e-13 && solver.step(); ++t)
                {
                    const double e = solution_error(solver.state(), sys, V.col(k));
                    worst = std::max(worst, e - prev);
                    prev = e;
                    ++iterations;
                }
            }
    }
    return {worst <= 1e-12, std::to_string(iterations) + " iterations, max increase of ||x - x*|| = " +
                                fmt("%.3e", std::max(worst, 0.0))};
}

Outcome ogrk_rate_bound()
{
    const auto sys = instance(64, 8, 8, 0.35, 0.0, 7);
    const ConvergenceBound bound = estimate_rate_bound(sys);
    const CMatrix V = auxiliary_matrix(sys.H(), sys.xi());
    const int trials = 400, horizon = 24;
    std::vector<double> sum(horizon, 0.0);
    std::vector<int> count(horizon, 0);
    for (int trial = 0; trial < trials; ++trial)
    {
        const int k = trial % sys.n_users();
        RhsSolver solver(Scheme::VrOgrk, sys, k, make_stream(99, static_cast<std::uint64_t>(trial)));
        double prev = solution_error(solver.state(), sys, V.col(k));
        for (int t = 0; t < horizon; ++t)
        {
            if (prev < 1e-12 || !solver.step())
                break;
            const double e = solution_error(solver.state(), sys, V.col(k));
            sum[static_cast<std::size_t>(t)] += (e * e) / (prev * prev);
            ++count[static_cast<std::size_t>(t)];
            prev = e;
        }
    }
    double worst = 0.0;
    for (int t = 0; t < horizon; ++t)
        if (count[static_cast<std::size_t>(t)] >= 200)
            worst = std::max(worst, sum[static_cast<std::size_t>(t)] / count[static_cast<std::size_t>(t)]);
    return {worst <= bound.eta + 0.02,
            "eta = " + fmt("%.4f", bound.eta) + ", worst seed-averaged ratio " + fmt("%.4f", worst) + " over " +
                std::to_string(trials) + " trials"};
}

Outcome convergence_ordering()
{
    const ExperimentConfig cfg = ExperimentConfig::desk();
    const int n = 50;
    const auto schemes = all_schemes();
    std::vector<std::vector<double>> iters(schemes.size(), std::vector<double>(n));
    std::vector<int> unconverged(n, 0);
    parallel_for(n, pool_size(), [&](int j) {
        const Instance inst = make_instance(cfg, static_cast<std::uint64_t>(j + 1), cfg.snr_db);
        for (std::size_t s = 0; s < schemes.size(); ++s)
        {
            const RunTrace tr = run_scheme(cfg, inst, schemes[s], 0, false);
            iters[s][static_cast<std::size_t>(j)] = static_cast<double>(tr.iterations);
            unconverged[static_cast<std::size_t>(j)] += !tr.converged;
        }
    });
    std::map<Scheme, double> med;
    for (std::size_t s = 0; s < schemes.size(); ++s)
    {
        auto v = iters[s];
        std::sort(v.begin(), v.end());
        med[schemes[s]] = 0.5 * (v[n / 2 - 1] + v[n / 2]);
    }
    const double oahk = med[Scheme::VrOahk], ogrk = med[Scheme::VrOgrk], gk = med[Scheme::GK],
                 swor = med[Scheme::SworERK], urk = med[Scheme::URK];
    std::string detail = "median rounds";
    for (Scheme s : schemes)
        detail += " " + std::string(scheme_name(s)) + "=" + fmt("%g", med[s]);
    std::vector<std::string> broken;
    if (!(oahk < ogrk))
        broken.push_back("VR-OAHK < VR-OGRK");
    if (!(ogrk <= gk))
        broken.push_back("VR-OGRK <= GK");
    if (!(gk < swor))
        broken.push_back("GK < SWOR-ERK");
    if (!(swor <= urk))
        broken.push_back("SWOR-ERK <= URK");
    const int u = std::accumulate(unconverged.begin(), unconverged.end(), 0);
    if (u > 0)
        broken.push_back(std::to_string(u) + " runs hit the iteration cap");
    for (const auto& b : broken)
        detail += "; violated: " + b;
    detail += "; reference at N_t=2000, K=30: 27 (VR-OGRK) and 5 (VR-OAHK), not asserted";
    return {broken.empty(), detail};
}

// Closed forms evaluated in 64-bit integers, independently of the library.
std::int64_t table_value(FlopFormula f, std::int64_t N, std::int64_t K, std::int64_t T, std::int64_t G,
                         std::int64_t X, std::int64_t Q, std::int64_t O, std::int64_t Nn)
{
    switch (f)
    {
    case FlopFormula::RZF:
        return 8 * K * K * K + 9 * K * K + 12 * N * K * K - 3 * K;
    case FlopFormula::URK:
        return 8 * N * K * K + 4 * N * K + T * (16 * N - 4);
    case FlopFormula::SworERK:
        return 8 * N * K * K + 4 * N * K + K - 1 + T * (16 * N + K + 8);
    case FlopFormula::GK:
        return 8 * N * K * K + 4 * N * K - K + T * (8 * N * (K + 1) + K - 5);
    case FlopFormula::VrOgrk:
        // 8 N K (Q + 1/2) kept exact by doubling.
        return (16 * N * K * Q + 8 * N * K) / 2 - K + T * (8 * G * (X + 1) + K - 5);
    case FlopFormula::VrOahk:
        return (16 * N * K * Q + 8 * N * K) / 2 + T * (8 * G * (2 * Nn + O + 2) + 24 * Nn + 14 * N + 5);
    }
    return -1;
}

Outcome flops_formulas()
{
    const FlopFormula all[] = {FlopFormula::RZF,  FlopFormula::URK,    FlopFormula::SworERK,
                               FlopFormula::GK,   FlopFormula::VrOgrk, FlopFormula::VrOahk};
    Rng rng(2024);
    int mismatches = 0, checked = 0;
    for (int tuple = 0; tuple < 20; ++tuple)
    {
        const std::int64_t K = 1 + static_cast<std::int64_t>(rng() % 40);
        const std::int64_t N = K + static_cast<std::int64_t>(rng() % 3000);
        const std::int64_t T = static_cast<std::int64_t>(rng() % 5000);
        const std::int64_t G = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(N));
        const std::int64_t X = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(K));
        const std::int64_t Q = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(K + 1));
        const std::int64_t O = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(K));
        const VrStats st{static_cast<double>(G), static_cast<double>(X), static_cast<double>(Q),
                         static_cast<int>(O), static_cast<int>(K - O)};
        for (FlopFormula f : all)
        {
            const double got = analytic_flops(f, static_cast<int>(N), static_cast<int>(K), static_cast<double>(T), st);
            mismatches += got != static_cast<double>(table_value(f, N, K, T, G, X, Q, O, K - O));
            ++checked;
        }
    }

    // Measured kernel tallies per iteration against the per-iteration term.
    double worst = 0.0;
    std::string per;
    const Scheme rk_family[] = {Scheme::URK, Scheme::SworERK, Scheme::GK, Scheme::GRK, Scheme::VrOgrk};
    for (Scheme s : rk_family)
    {
        double ratio_sum = 0.0;
        int runs = 0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed)
        {
            const auto sys = instance(256, 16, 16, 0.35, 0.0, seed);
            const VrStats st = realized_vr_stats(sys.channel(), sys.partition());
            const double term = analytic_flops_per_iteration(*formula_for(s), 256, 16, st);
            for (int k = 0; k < 16; k += 3)
            {
                RhsSolver solver(s, sys, k, make_stream(seed, static_cast<std::uint64_t>(k)));
                int t = 0;
                while (t < 60 && solver.step())
                    ++t;
                ratio_sum += static_cast<double>(solver.flops().total()) / t / term;
                ++runs;
            }
        }
        const double ratio = ratio_sum / runs;
        worst = std::max(worst, std::abs(ratio - 1.0));
        per += " " + std::string(scheme_name(s)) + "=" + fmt("%.3f", ratio);
    }
    return {mismatches == 0 && worst <= 0.10,
            std::to_string(checked - mismatches) + "/" + std::to_string(checked) +
                " closed-form evaluations exact; measured/analytic per iteration" + per};
}

Outcome vr_assembly()
{
    double gap = 0.0, worst_fraction = 1e300;
    for (std::uint64_t seed = 1; seed <= 100; ++seed)
    {
        const auto sys = instance(64, 8, 8, 0.5, 0.0, seed);
        const SubarrayChannel sub(sys.channel(), sys.partition());
        const CMatrix V = auxiliary_matrix(sys.H(), sys.xi());
        FlopCounter dense_cost, vr_cost;
        const auto a = assemble_dense(sys.H(), V, &dense_cost);
        const auto b = assemble_vr(sub, V, &vr_cost);
        gap = std::max(gap, (a.F - b.F).cwiseAbs().maxCoeff());
        const double ratio = static_cast<double>(dense_cost.total()) / static_cast<double>(vr_cost.total());
        const double target = sys.n_users() / sub.mean_users_per_subarray();
        worst_fraction = std::min(worst_fraction, ratio / target);
    }
    return {gap <= 1e-12 && worst_fraction >= 0.85,
            "max entrywise gap " + fmt("%.3e", gap) + "; worst cost ratio / (K/|Q|) = " + fmt("%.3f", worst_fraction)};
}

Outcome rzf_limits()
{
    double worst_cos = 1.0, worst_zf = 0.0;
    int used = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed)
    {
        const auto sys = instance(64, 8, 8, 0.5, 0.0, seed);
        const CMatrix& H = sys.H();
        const double xi = 1e6 * sys.row_energies().maxCoeff();
        const CMatrix Fr = rzf_precoder(H, xi).F;
        for (int k = 0; k < H.cols(); ++k)
            worst_cos = std::min(worst_cos, std::abs(H.col(k).dot(Fr.col(k))) / (H.col(k).norm() * Fr.col(k).norm()));

        Eigen::SelfAdjointEigenSolver<CMatrix> eig(H.adjoint() * H, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() < 1e-6 * eig.eigenvalues().maxCoeff())
            continue;
        ++used;
        const CMatrix D = H.adjoint() * rzf_precoder(H, 0.0).F;
        const cplx c = D.diagonal().mean();
        worst_zf = std::max(worst_zf, (D - c * CMatrix::Identity(D.rows(), D.cols())).cwiseAbs().maxCoeff() / std::abs(c));
    }
    return {worst_cos >= 1.0 - 1e-6 && worst_zf <= 1e-9 && used > 0,
            "min cosine to MRC " + fmt("%.12f", worst_cos) + "; max |H^H F - cI| / |c| = " + fmt("%.3e", worst_zf) +
                " on " + std::to_string(used) + " full-rank instances"};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria = {
    {"oracle_equivalence", oracle_equivalence},
    {"optimality_condition", optimality_condition},
    {"disjoint_residuals_unchanged", disjoint_residuals_unchanged},
    {"disjoint_channels_orthogonal", disjoint_channels_orthogonal},
    {"orthogonal_block_exact", orthogonal_block_exact},
    {"block_equals_aggregate", block_equals_aggregate},
    {"monotone_error", monotone_error},
    {"ogrk_rate_bound", ogrk_rate_bound},
    {"convergence_ordering", convergence_ordering},
    {"flops_formulas", flops_formulas},
    {"vr_assembly", vr_assembly},
    {"rzf_limits", rzf_limits},
};

} // namespace

int main(int argc, char** argv)
{
    const std::string only = argc > 1 ? argv[1] : "";
    bool any = false, ok = true;
    for (const auto& [name, run] : kCriteria)
    {
        if (!only.empty() && only != name)
            continue;
        any = true;
        Outcome o;
        try
        {
            o = run();
        }
        catch (const std::exception& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
        ok = ok && o.pass;
    }
    if (!any)
    {
        std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
        return 2;
    }
    return ok ? 0 : 1;
}
