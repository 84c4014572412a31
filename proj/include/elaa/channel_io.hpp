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

#include <cstdint>
#include <iosfwd>

namespace elaa
{

// A channel realization together with the parameters that produced it.
struct ChannelRecord
{
    ChannelMatrix channel;
    std::uint64_t seed = 0;
    double visibility_p = 1.0;
};

// Text format (also described in the README):
//
//   elaa-channel 1
//   n_antennas <N_t>
//   n_users <K>
//   n_subarrays <S>
//   carrier_freq <Hz>
//   seed <u64>
//   p <probability>
//   vr <k> <s> <s> ...          one line per user, 0-based subarray ids
//   data
//   <re> <im> ... (K pairs)     one line per antenna row, row-major
//
// Values are printed with 17 significant digits so a write/read cycle is
// lossless.
void write_channel(std::ostream& out, const ChannelRecord& record);

// Throws InvalidArgument with a line diagnostic on malformed input, and
// IntegrityError when the entries contradict the stated visibility regions.
ChannelRecord read_channel(std::istream& in);

} // namespace elaa
