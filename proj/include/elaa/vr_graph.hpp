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

#include <iosfwd>
#include <span>
#include <vector>

namespace elaa
{

// Undirected user graph with an edge wherever two visibility regions share a
// subarray. Users whose vertices are not adjacent have orthogonal channels.
class OverlapGraph
{
  public:
    OverlapGraph() = default;
    explicit OverlapGraph(std::vector<std::vector<int>> adjacency);

    int size() const { return static_cast<int>(adjacency_.size()); }
    const std::vector<int>& neighbors(int v) const { return adjacency_[static_cast<std::size_t>(v)]; }
    int degree(int v) const { return static_cast<int>(neighbors(v).size()); }
    bool adjacent(int u, int v) const;
    std::size_t edge_count() const;

  private:
    std::vector<std::vector<int>> adjacency_; // sorted, symmetric, no self-loops
};

OverlapGraph build_overlap_graph(std::span<const VisibilityRegion> regions);

// Maximal independent set, minimum current degree first, lowest index on ties.
// Returned ids are sorted.
std::vector<int> greedy_max_independent_set(const OverlapGraph& graph);

struct UserPartition
{
    std::vector<int> orthogonal;     // O: pairwise non-overlapping users
    std::vector<int> non_orthogonal; // N: everyone else
    // X_k: users whose regions overlap user k's, including k itself.
    std::vector<std::vector<int>> neighbor_sets;
    // Q_s: users that see subarray s.
    std::vector<std::vector<int>> subarray_users;

    int n_users() const { return static_cast<int>(neighbor_sets.size()); }
    int n_subarrays() const { return static_cast<int>(subarray_users.size()); }
};

// Throws InvalidArgument on an empty region list or mixed array layouts.
UserPartition build_partition(std::span<const VisibilityRegion> regions);

// Human-readable dump: per-user M_k and X_k, per-subarray Q_s, the set O.
void write_partition(std::ostream& out, std::span<const VisibilityRegion> regions, const UserPartition& partition);

} // namespace elaa
