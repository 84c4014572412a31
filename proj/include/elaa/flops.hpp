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

#include <cstdint>

namespace elaa
{

// Real floating-point operation tally, charged by the numerical kernels as
// they run. Convention: complex multiply = 6, complex add = 2, complex times
// or divided by real = 2, |z|^2 = 3, real op = 1.
//
// A null counter pointer is accepted everywhere and means "not counted".
class FlopCounter
{
  public:
    void complex_mul(std::uint64_t n = 1) { total_ += 6 * n; }
    void complex_add(std::uint64_t n = 1) { total_ += 2 * n; }
    void complex_real(std::uint64_t n = 1) { total_ += 2 * n; }
    void abs2(std::uint64_t n = 1) { total_ += 3 * n; }
    void real(std::uint64_t n = 1) { total_ += n; }

    // conj(a)^T b over n entries: n multiplies, n-1 additions.
    void dot(std::uint64_t n)
    {
        if (n > 0)
            total_ += 8 * n - 2;
    }
    // y += alpha * x over n entries.
    void axpy(std::uint64_t n) { total_ += 8 * n; }
    // Dense complex (m x k) * (k x n) product, one multiply-add per term.
    void gemm(std::uint64_t m, std::uint64_t n, std::uint64_t k) { total_ += 8 * m * n * k; }

    std::uint64_t total() const { return total_; }
    void reset() { total_ = 0; }

    FlopCounter& operator+=(const FlopCounter& other)
    {
        total_ += other.total_;
        return *this;
    }

  private:
    std::uint64_t total_ = 0;
};

} // namespace elaa
