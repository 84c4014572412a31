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

#include "elaa/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace elaa
{

void ArrayConfig::validate() const
{
    if (n_antennas <= 0)
        throw InvalidArgument("ArrayConfig: n_antennas must be positive");
    if (n_subarrays <= 0)
        throw InvalidArgument("ArrayConfig: n_subarrays must be positive");
    if (n_antennas % n_subarrays != 0)
        throw InvalidArgument("ArrayConfig: n_subarrays must divide n_antennas");
    if (!(carrier_freq > 0.0) || !std::isfinite(carrier_freq))
        throw InvalidArgument("ArrayConfig: carrier_freq must be positive");
}

// ------------------------------------------------------------------------
// VisibilityRegion

VisibilityRegion::VisibilityRegion(std::vector<int> visible, const ArrayConfig& cfg)
    : subarrays_(std::move(visible)), n_subarrays_(cfg.n_subarrays), subarray_size_(cfg.subarray_size())
{
    cfg.validate();
    std::sort(subarrays_.begin(), subarrays_.end());
    subarrays_.erase(std::unique(subarrays_.begin(), subarrays_.end()), subarrays_.end());
    if (subarrays_.empty())
        throw InvalidArgument("VisibilityRegion: at least one subarray must be visible");
    if (subarrays_.front() < 0 || subarrays_.back() >= n_subarrays_)
        throw InvalidArgument("VisibilityRegion: subarray id out of range");

    for (int s : subarrays_)
    {
        const int begin = s * subarray_size_;
        if (!ranges_.empty() && ranges_.back().end == begin)
            ranges_.back().end = begin + subarray_size_;
        else
            ranges_.push_back({begin, begin + subarray_size_});
    }
}

VisibilityRegion VisibilityRegion::full(const ArrayConfig& cfg)
{
    std::vector<int> all(static_cast<std::size_t>(cfg.n_subarrays));
    for (int s = 0; s < cfg.n_subarrays; ++s)
        all[static_cast<std::size_t>(s)] = s;
    return VisibilityRegion(std::move(all), cfg);
}

bool VisibilityRegion::contains(int subarray) const
{
    return std::binary_search(subarrays_.begin(), subarrays_.end(), subarray);
}

bool VisibilityRegion::overlaps(const VisibilityRegion& other) const
{
    auto a = subarrays_.begin();
    auto b = other.subarrays_.begin();
    while (a != subarrays_.end() && b != other.subarrays_.end())
    {
        if (*a == *b)
            return true;
        if (*a < *b)
            ++a;
        else
            ++b;
    }
    return false;
}

std::vector<int> VisibilityRegion::antenna_indices() const
{
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(antenna_count()));
    for (const auto& r : ranges_)
        for (int n = r.begin; n < r.end; ++n)
            out.push_back(n);
    return out;
}

RVector VisibilityRegion::indicator() const
{
    RVector u = RVector::Zero(n_subarrays_ * subarray_size_);
    for (const auto& r : ranges_)
        u.segment(r.begin, r.size()).setOnes();
    return u;
}

// ------------------------------------------------------------------------
// ChannelMatrix

ChannelMatrix::ChannelMatrix(ArrayConfig cfg, CMatrix entries, std::vector<VisibilityRegion> regions)
    : cfg_(cfg), entries_(std::move(entries)), regions_(std::move(regions))
{
    cfg_.validate();
    if (entries_.rows() != cfg_.n_antennas)
        throw InvalidArgument("ChannelMatrix: row count differs from n_antennas");
    if (entries_.cols() < 1)
        throw InvalidArgument("ChannelMatrix: at least one user required");
    if (static_cast<std::size_t>(entries_.cols()) != regions_.size())
        throw InvalidArgument("ChannelMatrix: one visibility region per column required");

    for (Eigen::Index k = 0; k < entries_.cols(); ++k)
    {
        const auto& vr = regions_[static_cast<std::size_t>(k)];
        if (vr.n_subarrays() != cfg_.n_subarrays || vr.subarray_size() != cfg_.subarray_size())
            throw IntegrityError("ChannelMatrix: visibility region built for another array");
        const RVector u = vr.indicator();
        for (Eigen::Index n = 0; n < entries_.rows(); ++n)
            if (u[n] == 0.0 && entries_(n, k) != cplx{})
                throw IntegrityError("ChannelMatrix: nonzero entry outside the visibility region of user " +
                                     std::to_string(k));
    }
}

ChannelMatrix ChannelMatrix::scaled(const RVector& scale) const
{
    if (scale.size() != entries_.cols())
        throw InvalidArgument("ChannelMatrix::scaled: one factor per column required");
    CMatrix out = entries_;
    for (Eigen::Index k = 0; k < out.cols(); ++k)
    {
        if (!(scale[k] > 0.0))
            throw InvalidArgument("ChannelMatrix::scaled: factors must be positive");
        out.col(k) *= scale[k];
    }
    return ChannelMatrix(cfg_, std::move(out), regions_);
}

// ------------------------------------------------------------------------
// Geometry

std::vector<double> antenna_positions(const ArrayConfig& cfg)
{
    cfg.validate();
    std::vector<double> x(static_cast<std::size_t>(cfg.n_antennas));
    const double d = cfg.spacing();
    for (int pos = 0; pos < cfg.n_antennas; ++pos)
        x[static_cast<std::size_t>(pos)] = cfg.antenna_index(pos) * d;
    return x;
}

namespace
{

void validate_path(const PathSpec& path)
{
    if (!(path.center_distance > 0.0) || !std::isfinite(path.center_distance))
        throw InvalidArgument("PathSpec: center_distance must be positive");
    if (!std::isfinite(path.angle))
        throw InvalidArgument("PathSpec: angle must be finite");
    if (!std::isfinite(path.gain.real()) || !std::isfinite(path.gain.imag()))
        throw InvalidArgument("PathSpec: gain must be finite");
}

} // namespace

RVector distance_profile(const PathSpec& path, const ArrayConfig& cfg)
{
    cfg.validate();
    validate_path(path);
    const double d = cfg.spacing();
    const double d0 = path.center_distance;
    const double c = std::cos(path.angle);
    RVector dist(cfg.n_antennas);
    for (int pos = 0; pos < cfg.n_antennas; ++pos)
    {
        const double nd = cfg.antenna_index(pos) * d;
        dist[pos] = std::sqrt(d0 * d0 + nd * nd - 2.0 * nd * d0 * c);
    }
    return dist;
}

CVector steering_vector(const PathSpec& path, const ArrayConfig& cfg)
{
    const RVector dist = distance_profile(path, cfg);
    const double k0 = 2.0 * std::numbers::pi / cfg.wavelength();
    const double amp = 1.0 / std::sqrt(static_cast<double>(cfg.n_antennas));
    CVector a(cfg.n_antennas);
    for (int pos = 0; pos < cfg.n_antennas; ++pos)
        a[pos] = std::polar(amp, -k0 * (dist[pos] - path.center_distance));
    return a;
}

CVector stationary_channel(const UserSpec& user, const ArrayConfig& cfg)
{
    if (user.paths.empty())
        throw InvalidArgument("UserSpec: at least one path required");
    CVector h = CVector::Zero(cfg.n_antennas);
    for (const auto& path : user.paths)
        h += path.gain * steering_vector(path, cfg);
    h *= std::sqrt(static_cast<double>(cfg.n_antennas) / static_cast<double>(user.paths.size()));
    return h;
}

// ------------------------------------------------------------------------
// Visibility

VisibilityRegion sample_visibility(double p, const ArrayConfig& cfg, Rng& rng)
{
    cfg.validate();
    if (!(p > 0.0 && p <= 1.0))
        throw InvalidArgument("sample_visibility: probability must lie in (0, 1]");
    std::bernoulli_distribution visible(p);
    std::vector<int> subs;
    while (subs.empty())
    {
        for (int s = 0; s < cfg.n_subarrays; ++s)
            if (visible(rng))
                subs.push_back(s);
    }
    return VisibilityRegion(std::move(subs), cfg);
}

CVector apply_visibility(const CVector& stationary, const VisibilityRegion& vr)
{
    const RVector u = vr.indicator();
    if (u.size() != stationary.size())
        throw InvalidArgument("apply_visibility: length mismatch");
    return stationary.cwiseProduct(u.cast<cplx>());
}

ChannelMatrix build_channel_matrix(std::span<const UserSpec> users, const ArrayConfig& cfg)
{
    cfg.validate();
    if (users.empty())
        throw InvalidArgument("build_channel_matrix: at least one user required");
    CMatrix H(cfg.n_antennas, static_cast<Eigen::Index>(users.size()));
    std::vector<VisibilityRegion> regions;
    regions.reserve(users.size());
    for (std::size_t k = 0; k < users.size(); ++k)
    {
        H.col(static_cast<Eigen::Index>(k)) = apply_visibility(stationary_channel(users[k], cfg), users[k].visibility);
        regions.push_back(users[k].visibility);
    }
    return ChannelMatrix(cfg, std::move(H), std::move(regions));
}

std::vector<UserSpec> random_users(const ArrayConfig& cfg, const ScenarioParams& params, Rng& rng)
{
    cfg.validate();
    if (params.n_users < 1)
        throw InvalidArgument("random_users: n_users must be positive");
    if (params.n_paths < 1)
        throw InvalidArgument("random_users: n_paths must be positive");
    if (!(params.min_distance > 0.0 && params.max_distance >= params.min_distance))
        throw InvalidArgument("random_users: invalid distance range");

    std::uniform_real_distribution<double> dist(params.min_distance, params.max_distance);
    std::uniform_real_distribution<double> angle(params.min_angle, params.max_angle);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));

    std::vector<UserSpec> users(static_cast<std::size_t>(params.n_users));
    for (auto& user : users)
    {
        user.paths.resize(static_cast<std::size_t>(params.n_paths));
        for (auto& path : user.paths)
        {
            path.angle = angle(rng);
            path.center_distance = dist(rng);
            const double re = normal(rng);
            const double im = normal(rng);
            path.gain = {re, im};
        }
        user.visibility = sample_visibility(params.visibility_p, cfg, rng);
    }
    return users;
}

ChannelMatrix generate_channel(const ArrayConfig& cfg, const ScenarioParams& params, Rng& rng)
{
    const auto users = random_users(cfg, params, rng);
    return build_channel_matrix(users, cfg);
}

PowerControlled power_control(const ChannelMatrix& channel, double snr_db)
{
    if (!std::isfinite(snr_db))
        throw InvalidArgument("power_control: SNR must be finite");
    const CMatrix& H = channel.entries();
    RVector scale(H.cols());
    for (Eigen::Index k = 0; k < H.cols(); ++k)
    {
        const double norm = H.col(k).norm();
        if (!(norm > 0.0))
            throw InvalidArgument("power_control: user " + std::to_string(k) + " has a zero channel");
        scale[k] = 1.0 / norm;
    }
    return {channel.scaled(scale), 1.0 / db_to_linear(snr_db)};
}

} // namespace elaa
