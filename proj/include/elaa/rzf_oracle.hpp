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

#include "elaa/types.hpp"

#include <string>

namespace elaa
{

// Power-normalized precoder F = norm_factor * (unnormalized F).
struct Precoder
{
    CMatrix F;
    double norm_factor = 1.0;
    std::string scheme;
};

// Scales `unnormalized` to unit Frobenius norm. Throws InvalidArgument if it
// is identically zero.
Precoder normalize_precoder(CMatrix unnormalized, std::string scheme);

// H^H H + xi I, Hermitian K x K.
CMatrix regularized_gram(const CMatrix& H, double xi);

// (H^H H + xi I)^{-1} S via a Cholesky factorization of the Gram system.
// Throws RankDeficient if the system is not numerically positive definite
// (only possible for xi == 0) and InvalidArgument if xi < 0.
CMatrix solve_gram(const CMatrix& H, double xi, const CMatrix& rhs);

// v = (H^H H + xi I)^{-1} s.
CVector apply_auxiliary(const CMatrix& H, double xi, const CVector& s);

// V = (H^H H + xi I)^{-1}; column k is the auxiliary vector of e_k.
CMatrix auxiliary_matrix(const CMatrix& H, double xi);

// Regularized zero forcing; xi == 0 gives zero forcing.
Precoder rzf_precoder(const CMatrix& H, double xi);

// F proportional to H.
Precoder mrc_precoder(const CMatrix& H);

} // namespace elaa
