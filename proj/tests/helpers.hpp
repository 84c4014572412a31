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
#include "elaa/kaczmarz.hpp"
#include "oracles.hpp"

namespace testing
{

inline elaa::ChannelMatrix random_channel(int nt, int k, int s, double p, std::uint64_t seed, int paths = 3)
{
    elaa::ArrayConfig cfg{nt, 100e9, s};
    elaa::ScenarioParams sp;
    sp.n_users = k;
    sp.n_paths = paths;
    sp.visibility_p = p;
    elaa::Rng rng = elaa::make_stream(seed, 0);
    return elaa::generate_channel(cfg, sp, rng);
}

inline elaa::AugmentedSystem random_system(int nt, int k, int s, double p, double snr_db, std::uint64_t seed)
{
    auto pc = elaa::power_control(random_channel(nt, k, s, p, seed), snr_db);
    return elaa::AugmentedSystem(std::move(pc.channel), pc.xi);
}

inline oracle::Mat to_mat(const elaa::CMatrix& m)
{
    oracle::Mat out = oracle::zeros(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            out[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = m(r, c);
    return out;
}

inline elaa::CMatrix from_mat(const oracle::Mat& m)
{
    elaa::CMatrix out(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m.front().size()));
    for (std::size_t r = 0; r < m.size(); ++r)
        for (std::size_t c = 0; c < m.front().size(); ++c)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m[r][c];
    return out;
}

} // namespace testing
