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

#include "elaa/vr_graph.hpp"

#include <algorithm>
#include <ostream>

namespace elaa
{

OverlapGraph::OverlapGraph(std::vector<std::vector<int>> adjacency) : adjacency_(std::move(adjacency))
{
    const int n = size();
    for (int v = 0; v < n; ++v)
    {
        auto& nb = adjacency_[static_cast<std::size_t>(v)];
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        for (int u : nb)
        {
            if (u < 0 || u >= n)
                throw InvalidArgument("OverlapGraph: neighbor id out of range");
            if (u == v)
                throw InvalidArgument("OverlapGraph: self-loops are not allowed");
        }
    }
    for (int v = 0; v < n; ++v)
        for (int u : neighbors(v))
            if (!adjacent(u, v))
                throw InvalidArgument("OverlapGraph: adjacency must be symmetric");
}

bool OverlapGraph::adjacent(int u, int v) const
{
    const auto& nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

std::size_t OverlapGraph::edge_count() const
{
    std::size_t twice = 0;
    for (const auto& nb : adjacency_)
        twice += nb.size();
    return twice / 2;
}

OverlapGraph build_overlap_graph(std::span<const VisibilityRegion> regions)
{
    const int K = static_cast<int>(regions.size());
    std::vector<std::vector<int>> adj(regions.size());
    for (int i = 0; i < K; ++i)
        for (int j = i + 1; j < K; ++j)
            if (regions[static_cast<std::size_t>(i)].overlaps(regions[static_cast<std::size_t>(j)]))
            {
                adj[static_cast<std::size_t>(i)].push_back(j);
                adj[static_cast<std::size_t>(j)].push_back(i);
            }
    return OverlapGraph(std::move(adj));
}

std::vector<int> greedy_max_independent_set(const OverlapGraph& graph)
{
    const int n = graph.size();
    std::vector<int> degree(static_cast<std::size_t>(n));
    std::vector<char> alive(static_cast<std::size_t>(n), 1);
    for (int v = 0; v < n; ++v)
        degree[static_cast<std::size_t>(v)] = graph.degree(v);

    auto remove = [&](int v) {
        alive[static_cast<std::size_t>(v)] = 0;
        for (int u : graph.neighbors(v))
            if (alive[static_cast<std::size_t>(u)])
                --degree[static_cast<std::size_t>(u)];
    };

    std::vector<int> chosen;
    for (;;)
    {
        int best = -1;
        for (int v = 0; v < n; ++v)
            if (alive[static_cast<std::size_t>(v)] &&
                (best < 0 || degree[static_cast<std::size_t>(v)] < degree[static_cast<std::size_t>(best)]))
                best = v;
        if (best < 0)
            break;
        chosen.push_back(best);
        remove(best);
        for (int u : graph.neighbors(best))
            if (alive[static_cast<std::size_t>(u)])
                remove(u);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

UserPartition build_partition(std::span<const VisibilityRegion> regions)
{
    if (regions.empty())
        throw InvalidArgument("build_partition: at least one user required");
    const int S = regions.front().n_subarrays();
    for (const auto& vr : regions)
        if (vr.n_subarrays() != S || vr.subarray_size() != regions.front().subarray_size())
            throw InvalidArgument("build_partition: regions describe different arrays");

    const OverlapGraph graph = build_overlap_graph(regions);
    UserPartition part;
    part.orthogonal = greedy_max_independent_set(graph);

    const int K = graph.size();
    std::vector<char> in_o(static_cast<std::size_t>(K), 0);
    for (int v : part.orthogonal)
        in_o[static_cast<std::size_t>(v)] = 1;
    for (int v = 0; v < K; ++v)
        if (!in_o[static_cast<std::size_t>(v)])
            part.non_orthogonal.push_back(v);

    part.neighbor_sets.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k)
    {
        auto& x = part.neighbor_sets[static_cast<std::size_t>(k)];
        x = graph.neighbors(k);
        x.insert(std::lower_bound(x.begin(), x.end(), k), k);
    }

    part.subarray_users.resize(static_cast<std::size_t>(S));
    for (int k = 0; k < K; ++k)
        for (int s : regions[static_cast<std::size_t>(k)].subarrays())
            part.subarray_users[static_cast<std::size_t>(s)].push_back(k);
    return part;
}

namespace
{

void write_ids(std::ostream& out, const std::vector<int>& ids)
{
    out << '{';
    for (std::size_t i = 0; i < ids.size(); ++i)
        out << (i ? " " : "") << ids[i];
    out << '}';
}

} // namespace

void write_partition(std::ostream& out, std::span<const VisibilityRegion> regions, const UserPartition& partition)
{
    out << "users " << partition.n_users() << " subarrays " << partition.n_subarrays() << '\n';
    for (int k = 0; k < partition.n_users(); ++k)
    {
        out << "user " << k << " M=";
        write_ids(out, regions[static_cast<std::size_t>(k)].subarrays());
        out << " X=";
        write_ids(out, partition.neighbor_sets[static_cast<std::size_t>(k)]);
        out << '\n';
    }
    for (int s = 0; s < partition.n_subarrays(); ++s)
    {
        out << "subarray " << s << " Q=";
        write_ids(out, partition.subarray_users[static_cast<std::size_t>(s)]);
        out << '\n';
    }
    out << "orthogonal ";
    write_ids(out, partition.orthogonal);
    out << "\nnon_orthogonal ";
    write_ids(out, partition.non_orthogonal);
    out << '\n';
}

} // namespace elaa
