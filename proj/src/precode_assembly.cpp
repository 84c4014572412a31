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

#include "elaa/precode_assembly.hpp"

#include <algorithm>
#include <string>

namespace elaa
{

SubarrayChannel::SubarrayChannel(const ChannelMatrix& channel, const UserPartition& partition)
    : n_users_(channel.n_users())
{
    const auto& cfg = channel.config();
    const int S = cfg.n_subarrays;
    if (partition.n_subarrays() != S || partition.n_users() != channel.n_users())
        throw IntegrityError("SubarrayChannel: partition does not describe this channel");
    block_rows_ = cfg.subarray_size();

    for (int s = 0; s < S; ++s)
    {
        std::vector<int> expected;
        for (int k = 0; k < channel.n_users(); ++k)
            if (channel.region(k).contains(s))
                expected.push_back(k);
        if (expected != partition.subarray_users[static_cast<std::size_t>(s)])
            throw IntegrityError("SubarrayChannel: Q_" + std::to_string(s) + " disagrees with the visibility regions");
    }

    // Columns outside Q_s must vanish on block s; the ChannelMatrix already
    // guarantees this, but a partition from elsewhere could be stale.
    const CMatrix& H = channel.entries();
    blocks_.resize(static_cast<std::size_t>(S));
    users_ = partition.subarray_users;
    for (int s = 0; s < S; ++s)
    {
        const auto& q = users_[static_cast<std::size_t>(s)];
        CMatrix& b = blocks_[static_cast<std::size_t>(s)];
        b.resize(block_rows_, static_cast<Eigen::Index>(q.size()));
        for (std::size_t j = 0; j < q.size(); ++j)
            b.col(static_cast<Eigen::Index>(j)) = H.col(q[j]).segment(s * block_rows_, block_rows_);
        for (int k = 0; k < n_users_; ++k)
            if (!std::binary_search(q.begin(), q.end(), k) &&
                !H.col(k).segment(s * block_rows_, block_rows_).isZero(0.0))
                throw IntegrityError("SubarrayChannel: nonzero channel entries outside Q_" + std::to_string(s));
    }
}

double SubarrayChannel::mean_users_per_subarray() const
{
    double total = 0.0;
    for (const auto& q : users_)
        total += static_cast<double>(q.size());
    return total / static_cast<double>(users_.size());
}

namespace
{

void check_v(const CMatrix& V, int K)
{
    if (V.rows() != K)
        throw InvalidArgument("assemble: V must have K rows");
}

void charge_normalization(FlopCounter* flops, std::uint64_t entries)
{
    if (flops)
    {
        flops->abs2(entries);
        flops->real(entries);
    }
}

} // namespace

CMatrix product_dense(const CMatrix& H, const CMatrix& V)
{
    check_v(V, static_cast<int>(H.cols()));
    return H * V;
}

CMatrix product_vr(const SubarrayChannel& sub, const CMatrix& V)
{
    check_v(V, sub.n_users());
    CMatrix F = CMatrix::Zero(sub.n_antennas(), V.cols());
    for (int s = 0; s < sub.n_subarrays(); ++s)
    {
        const auto& q = sub.users(s);
        if (q.empty())
            continue;
        CMatrix Vq(static_cast<Eigen::Index>(q.size()), V.cols());
        for (std::size_t j = 0; j < q.size(); ++j)
            Vq.row(static_cast<Eigen::Index>(j)) = V.row(q[j]);
        F.middleRows(s * sub.block_rows(), sub.block_rows()).noalias() = sub.block(s) * Vq;
    }
    return F;
}

Precoder assemble_dense(const CMatrix& H, const CMatrix& V, FlopCounter* flops)
{
    CMatrix F = product_dense(H, V);
    if (flops)
    {
        flops->gemm(static_cast<std::uint64_t>(H.rows()), static_cast<std::uint64_t>(V.cols()),
                    static_cast<std::uint64_t>(H.cols()));
        charge_normalization(flops, static_cast<std::uint64_t>(F.size()));
    }
    return normalize_precoder(std::move(F), "dense");
}

Precoder assemble_vr(const SubarrayChannel& sub, const CMatrix& V, FlopCounter* flops)
{
    CMatrix F = product_vr(sub, V);
    if (flops)
    {
        for (int s = 0; s < sub.n_subarrays(); ++s)
            flops->gemm(static_cast<std::uint64_t>(sub.block_rows()), static_cast<std::uint64_t>(V.cols()),
                        sub.users(s).size());
        charge_normalization(flops, static_cast<std::uint64_t>(F.size()));
    }
    return normalize_precoder(std::move(F), "vr");
}

} // namespace elaa
