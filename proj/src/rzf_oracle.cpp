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

#include "elaa/rzf_oracle.hpp"

#include <cmath>
#include <limits>

namespace elaa
{

Precoder normalize_precoder(CMatrix unnormalized, std::string scheme)
{
    const double norm = unnormalized.norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw InvalidArgument("normalize_precoder: degenerate (zero or non-finite) precoder");
    Precoder out;
    out.norm_factor = 1.0 / norm;
    out.F = std::move(unnormalized) * out.norm_factor;
    out.scheme = std::move(scheme);
    return out;
}

CMatrix regularized_gram(const CMatrix& H, double xi)
{
    if (!(xi >= 0.0) || !std::isfinite(xi))
        throw InvalidArgument("regularized_gram: xi must be finite and non-negative");
    CMatrix A = CMatrix::Zero(H.cols(), H.cols());
    A.selfadjointView<Eigen::Lower>().rankUpdate(H.adjoint());
    A = A.selfadjointView<Eigen::Lower>();
    A.diagonal().array() += xi;
    // Exact real diagonal.
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        A(i, i) = A(i, i).real();
    return A;
}

CMatrix solve_gram(const CMatrix& H, double xi, const CMatrix& rhs)
{
    if (rhs.rows() != H.cols())
        throw InvalidArgument("solve_gram: right-hand side has the wrong row count");
    const CMatrix A = regularized_gram(H, xi);
    Eigen::LLT<CMatrix> llt(A);
    if (llt.info() != Eigen::Success)
        throw RankDeficient("solve_gram: Gram matrix is not positive definite");

    // LLT succeeds on numerically singular matrices with tiny pivots; reject
    // those explicitly so xi == 0 on a rank-deficient H is reported.
    const auto L = llt.matrixL().toDenseMatrix();
    const double max_diag = A.diagonal().real().maxCoeff();
    const double min_pivot = L.diagonal().real().minCoeff();
    const double eps = std::numeric_limits<double>::epsilon();
    if (!(min_pivot * min_pivot > 64.0 * eps * static_cast<double>(A.rows()) * max_diag))
        throw RankDeficient("solve_gram: Gram matrix is numerically singular");

    return llt.solve(rhs);
}

CVector apply_auxiliary(const CMatrix& H, double xi, const CVector& s)
{
    return solve_gram(H, xi, s);
}

CMatrix auxiliary_matrix(const CMatrix& H, double xi)
{
    return solve_gram(H, xi, CMatrix::Identity(H.cols(), H.cols()));
}

Precoder rzf_precoder(const CMatrix& H, double xi)
{
    CMatrix F = H * auxiliary_matrix(H, xi);
    return normalize_precoder(std::move(F), xi == 0.0 ? "ZF" : "RZF");
}

Precoder mrc_precoder(const CMatrix& H)
{
    return normalize_precoder(H, "MRC");
}

} // namespace elaa
