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
#include "elaa/flops.hpp"
#include "elaa/rzf_oracle.hpp"
#include "elaa/vr_graph.hpp"

#include <vector>

namespace elaa
{

// Channel split into the S row blocks of the array, each restricted to the
// users that see that subarray.
class SubarrayChannel
{
  public:
    // Throws IntegrityError unless partition.subarray_users matches the
    // channel's VR metadata exactly.
    SubarrayChannel(const ChannelMatrix& channel, const UserPartition& partition);

    int n_subarrays() const { return static_cast<int>(blocks_.size()); }
    int block_rows() const { return block_rows_; }
    int n_antennas() const { return block_rows_ * n_subarrays(); }
    int n_users() const { return n_users_; }

    // [H_s]_{Q_s}: (N_t/S) x |Q_s|.
    const CMatrix& block(int s) const { return blocks_[static_cast<std::size_t>(s)]; }
    const std::vector<int>& users(int s) const { return users_[static_cast<std::size_t>(s)]; }

    // Mean |Q_s| over subarrays.
    double mean_users_per_subarray() const;

  private:
    std::vector<CMatrix> blocks_;
    std::vector<std::vector<int>> users_;
    int block_rows_ = 0;
    int n_users_ = 0;
};

// F = H V, normalized. Charges 8 N_t K^2 for the product plus 4 N_t K for
// the normalization. Throws InvalidArgument on V = 0 or mismatched shapes.
Precoder assemble_dense(const CMatrix& H, const CMatrix& V, FlopCounter* flops = nullptr);

// Block s of F is [H_s]_{Q_s} [V]_{Q_s,:}; rows of a user's channel outside
// its region are structural zeros, so this equals assemble_dense. Charges
// 8 (N_t/S) |Q_s| K per block plus the normalization.
Precoder assemble_vr(const SubarrayChannel& sub, const CMatrix& V, FlopCounter* flops = nullptr);

// Unnormalized counterparts, used when only the direction matters.
CMatrix product_dense(const CMatrix& H, const CMatrix& V);
CMatrix product_vr(const SubarrayChannel& sub, const CMatrix& V);

} // namespace elaa
