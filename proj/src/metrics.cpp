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

#include "elaa/metrics.hpp"

#include <Eigen/Eigenvalues>

#include "elaa/rzf_oracle.hpp"

#include <algorithm>
#include <cmath>

namespace elaa
{

double nmse(const CMatrix& F, const CMatrix& F_ref)
{
    if (F.rows() != F_ref.rows() || F.cols() != F_ref.cols())
        throw InvalidArgument("nmse: shape mismatch");
    const double ref = F_ref.norm();
    if (!(ref > 0.0))
        throw InvalidArgument("nmse: zero reference");
    return (F_ref - F).norm() / ref;
}

RateResult spectral_efficiency(const CMatrix& H, const CMatrix& F, double snr_linear)
{
    if (H.cols() != F.cols() || H.rows() != F.rows())
        throw InvalidArgument("spectral_efficiency: H and F must have the same shape");
    if (!(snr_linear > 0.0))
        throw InvalidArgument("spectral_efficiency: snr must be positive");
    if (F.norm() > 1.0 + 1e-9)
        throw InvalidArgument("spectral_efficiency: precoder violates the power constraint");

    const Eigen::Index K = H.cols();
    const double sigma2 = H.colwise().squaredNorm().mean() / snr_linear;
    const CMatrix G = H.adjoint() * F; // G(k, i) = h_k^H f_i
    RateResult out;
    out.per_user.resize(static_cast<std::size_t>(K));
    for (Eigen::Index k = 0; k < K; ++k)
    {
        const double signal = std::norm(G(k, k));
        const double interference = G.row(k).squaredNorm() - signal;
        const double rate = std::log2(1.0 + signal / (std::max(interference, 0.0) + sigma2));
        out.per_user[static_cast<std::size_t>(k)] = rate;
        out.sum += rate;
    }
    return out;
}

VrStats realized_vr_stats(const ChannelMatrix& channel, const UserPartition& partition)
{
    VrStats s;
    const int K = channel.n_users();
    for (int k = 0; k < K; ++k)
    {
        s.antennas += channel.region(k).antenna_count();
        s.neighbors += static_cast<double>(partition.neighbor_sets[static_cast<std::size_t>(k)].size());
    }
    s.antennas /= K;
    s.neighbors /= K;
    for (const auto& q : partition.subarray_users)
        s.subarray_users += static_cast<double>(q.size());
    s.subarray_users /= std::max(partition.n_subarrays(), 1);
    s.orthogonal = static_cast<int>(partition.orthogonal.size());
    s.non_orthogonal = static_cast<int>(partition.non_orthogonal.size());
    return s;
}

namespace
{

// Setup (T-independent) part of each formula.
double setup_flops(FlopFormula formula, double N, double K, const VrStats& st)
{
    switch (formula)
    {
    case FlopFormula::RZF:
        return 8 * K * K * K + 9 * K * K + 12 * N * K * K - 3 * K;
    case FlopFormula::URK:
        return 8 * N * K * K + 4 * N * K;
    case FlopFormula::SworERK:
        return 8 * N * K * K + 4 * N * K + K - 1;
    case FlopFormula::GK:
        return 8 * N * K * K + 4 * N * K - K;
    case FlopFormula::VrOgrk:
        return 8 * N * K * st.subarray_users + 4 * N * K - K;
    case FlopFormula::VrOahk:
        return 8 * N * K * st.subarray_users + 4 * N * K;
    }
    return 0.0;
}

} // namespace

double analytic_flops_per_iteration(FlopFormula formula, int n_antennas, int n_users, const VrStats& st)
{
    const double N = n_antennas, K = n_users;
    switch (formula)
    {
    case FlopFormula::RZF:
        return 0.0;
    case FlopFormula::URK:
        return 16 * N - 4;
    case FlopFormula::SworERK:
        return 16 * N + K + 8;
    case FlopFormula::GK:
        return 8 * N * (K + 1) + K - 5;
    case FlopFormula::VrOgrk:
        return 8 * st.antennas * (st.neighbors + 1) + K - 5;
    case FlopFormula::VrOahk:
        return 8 * st.antennas * (2.0 * st.non_orthogonal + st.orthogonal + 2) + 24.0 * st.non_orthogonal +
               14 * N + 5;
    }
    return 0.0;
}

double analytic_flops(FlopFormula formula, int n_antennas, int n_users, double T, const VrStats& st)
{
    if (n_antennas <= 0 || n_users <= 0 || T < 0)
        throw InvalidArgument("analytic_flops: sizes must be positive and T non-negative");
    return setup_flops(formula, n_antennas, n_users, st) +
           T * analytic_flops_per_iteration(formula, n_antennas, n_users, st);
}

std::optional<FlopFormula> formula_for(Scheme scheme)
{
    switch (scheme)
    {
    case Scheme::URK:
        return FlopFormula::URK;
    case Scheme::SworERK:
        return FlopFormula::SworERK;
    case Scheme::GK:
    case Scheme::GRK:
        return FlopFormula::GK;
    case Scheme::VrOgrk:
        return FlopFormula::VrOgrk;
    case Scheme::VrOahk:
        return FlopFormula::VrOahk;
    case Scheme::AHK:
        break;
    }
    return std::nullopt;
}

ConvergenceBound estimate_rate_bound(const AugmentedSystem& sys)
{
    if (sys.n_users() > 64)
        throw InvalidArgument("estimate_rate_bound: intended for K <= 64");
    const CMatrix gram = regularized_gram(sys.H(), sys.xi());
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
    ConvergenceBound b;
    const double lmin = std::max(eig.eigenvalues().minCoeff(), 0.0);
    b.kappa = std::sqrt(lmin);
    b.frob = std::sqrt(sys.row_energies().sum());
    b.eta = 1.0 - lmin / (b.frob * b.frob);
    return b;
}

double aggregation_contraction(const SolverState& state, const AugmentedSystem& sys, const CVector& v,
                               std::span<const int> rows)
{
    const int Nt = sys.n_antennas();
    const double sx = std::sqrt(sys.xi());
    const CVector e = augmented_iterate(state, sys) - augmented_solution(sys, v);
    const double e2 = e.squaredNorm();
    if (!(e2 > 0.0))
        return 1.0;

    // A e with A = [H^H, sqrt(xi) I].
    const CVector Ae = sys.H().adjoint() * e.head(Nt) + sx * e.tail(sys.n_users());
    CVector w = CVector::Zero(sys.n_users());
    for (int i : rows)
        w[i] = Ae[i] / sys.row_energy(i);
    CVector d(e.size());
    d.head(Nt) = sys.H() * w;
    d.tail(sys.n_users()) = sx * w;
    const double d2 = d.squaredNorm();
    if (!(d2 > 0.0))
        return 1.0;
    return 1.0 - std::norm(d.dot(e)) / (d2 * e2);
}

} // namespace elaa
