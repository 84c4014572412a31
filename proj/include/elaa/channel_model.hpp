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

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace elaa
{

inline constexpr double kSpeedOfLight = 2.99792458e8; // m/s

// Uniform linear array split into equally sized subarrays.
//
// Antenna indices run over -(N-1)/2 ... (N-1)/2 in unit steps, centred on the
// origin. For even N the indices are half-integers so the geometry stays
// symmetric. Storage order (vector position 0 ... N-1) follows the index order.
struct ArrayConfig
{
    int n_antennas = 256;
    double carrier_freq = 100e9; // Hz
    int n_subarrays = 16;

    double wavelength() const { return kSpeedOfLight / carrier_freq; }
    double spacing() const { return 0.5 * wavelength(); }
    int subarray_size() const { return n_antennas / n_subarrays; }

    // Signed antenna index of storage position `pos`.
    double antenna_index(int pos) const { return pos - 0.5 * (n_antennas - 1); }

    // Throws InvalidArgument on N <= 0, S <= 0, S not dividing N, f <= 0.
    void validate() const;
};

struct PathSpec
{
    double angle = 0.5 * std::numbers::pi; // radians, in (0, pi)
    double center_distance = 10.0;         // metres from the array centre
    cplx gain{1.0, 0.0};
};

// Half-open antenna storage range [begin, end).
struct AntennaRange
{
    int begin = 0;
    int end = 0;
    int size() const { return end - begin; }
};

// Set of subarrays visible to one user, with the derived antenna support.
// Subarray ids are 0-based here (the user-facing dumps are 0-based too).
class VisibilityRegion
{
  public:
    VisibilityRegion() = default;

    // `visible` may be unsorted and contain duplicates; it must be non-empty
    // and every id must lie in [0, S).
    VisibilityRegion(std::vector<int> visible, const ArrayConfig& cfg);

    static VisibilityRegion full(const ArrayConfig& cfg);

    const std::vector<int>& subarrays() const { return subarrays_; }
    int n_subarrays() const { return n_subarrays_; }
    int subarray_size() const { return subarray_size_; }

    bool contains(int subarray) const;
    bool overlaps(const VisibilityRegion& other) const;

    // Contiguous antenna ranges of the visible subarrays, adjacent subarrays
    // merged. Their union is the antenna support of the user.
    const std::vector<AntennaRange>& antenna_ranges() const { return ranges_; }
    int antenna_count() const { return static_cast<int>(subarrays_.size()) * subarray_size_; }
    std::vector<int> antenna_indices() const;

    // 0/1 mask over all N_t antennas.
    RVector indicator() const;

    bool operator==(const VisibilityRegion& other) const
    {
        return subarrays_ == other.subarrays_ && n_subarrays_ == other.n_subarrays_ &&
               subarray_size_ == other.subarray_size_;
    }

  private:
    std::vector<int> subarrays_;
    std::vector<AntennaRange> ranges_;
    int n_subarrays_ = 0;
    int subarray_size_ = 0;
};

struct UserSpec
{
    std::vector<PathSpec> paths; // paths[0] is the line-of-sight path
    VisibilityRegion visibility;
};

// N_t x K channel matrix; column k is identically zero outside the antenna
// support of region(k).
class ChannelMatrix
{
  public:
    ChannelMatrix() = default;

    // Verifies dimensions and the structural zero pattern; throws
    // IntegrityError if a column has a nonzero entry outside its region.
    ChannelMatrix(ArrayConfig cfg, CMatrix entries, std::vector<VisibilityRegion> regions);

    const ArrayConfig& config() const { return cfg_; }
    const CMatrix& entries() const { return entries_; }
    const std::vector<VisibilityRegion>& regions() const { return regions_; }
    const VisibilityRegion& region(int k) const { return regions_[static_cast<std::size_t>(k)]; }

    int n_antennas() const { return static_cast<int>(entries_.rows()); }
    int n_users() const { return static_cast<int>(entries_.cols()); }

    // Returns a copy with column k multiplied by scale[k] (> 0).
    ChannelMatrix scaled(const RVector& scale) const;

  private:
    ArrayConfig cfg_;
    CMatrix entries_;
    std::vector<VisibilityRegion> regions_;
};

// x-coordinates n*d of all antennas, metres.
std::vector<double> antenna_positions(const ArrayConfig& cfg);

// Law-of-cosines distance from the path's scatterer (or user) to every antenna.
RVector distance_profile(const PathSpec& path, const ArrayConfig& cfg);

// Spherical-wave array response: exp(-j 2pi/lambda (d_n - d_0)) / sqrt(N_t).
CVector steering_vector(const PathSpec& path, const ArrayConfig& cfg);

// sqrt(N_t / L) * sum_l gain_l * a(theta_l, d_l).
CVector stationary_channel(const UserSpec& user, const ArrayConfig& cfg);

// Each subarray visible independently with probability p; an empty draw is
// resampled. Throws InvalidArgument unless 0 < p <= 1.
VisibilityRegion sample_visibility(double p, const ArrayConfig& cfg, Rng& rng);

// Hadamard product with the region's indicator.
CVector apply_visibility(const CVector& stationary, const VisibilityRegion& vr);

ChannelMatrix build_channel_matrix(std::span<const UserSpec> users, const ArrayConfig& cfg);

// Random scenario generation for experiments.
struct ScenarioParams
{
    int n_users = 16;
    int n_paths = 5;           // L_k, common to all users
    double visibility_p = 0.35;
    double min_distance = 1.0; // metres
    double max_distance = 50.0;
    double min_angle = std::numbers::pi / 6.0;
    double max_angle = 5.0 * std::numbers::pi / 6.0;
};

// Draws user geometry, complex-normal path gains and visibility regions.
std::vector<UserSpec> random_users(const ArrayConfig& cfg, const ScenarioParams& params, Rng& rng);

// random_users followed by build_channel_matrix.
ChannelMatrix generate_channel(const ArrayConfig& cfg, const ScenarioParams& params, Rng& rng);

struct PowerControlled
{
    ChannelMatrix channel;
    double xi = 1.0; // regularization factor sigma^2 / rho = 1 / SNR
};

// Rescales every column to unit norm so all users see the same received SNR
// with rho = 1 and sigma^2 = 1/SNR. Throws InvalidArgument on a zero column.
PowerControlled power_control(const ChannelMatrix& channel, double snr_db);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

} // namespace elaa
