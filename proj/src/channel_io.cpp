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

#include "elaa/channel_io.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace elaa
{

void write_channel(std::ostream& out, const ChannelRecord& record)
{
    const auto& ch = record.channel;
    const auto& cfg = ch.config();
    const auto old_precision = out.precision();
    out << std::setprecision(17);
    out << "elaa-channel 1\n"
        << "n_antennas " << cfg.n_antennas << '\n'
        << "n_users " << ch.n_users() << '\n'
        << "n_subarrays " << cfg.n_subarrays << '\n'
        << "carrier_freq " << cfg.carrier_freq << '\n'
        << "seed " << record.seed << '\n'
        << "p " << record.visibility_p << '\n';
    for (int k = 0; k < ch.n_users(); ++k)
    {
        out << "vr " << k;
        for (int s : ch.region(k).subarrays())
            out << ' ' << s;
        out << '\n';
    }
    out << "data\n";
    const CMatrix& H = ch.entries();
    for (Eigen::Index n = 0; n < H.rows(); ++n)
    {
        for (Eigen::Index k = 0; k < H.cols(); ++k)
        {
            if (k > 0)
                out << ' ';
            out << H(n, k).real() << ' ' << H(n, k).imag();
        }
        out << '\n';
    }
    out.precision(old_precision);
}

namespace
{

class LineReader
{
  public:
    explicit LineReader(std::istream& in) : in_(in) {}

    std::istringstream next(const char* what)
    {
        std::string line;
        if (!std::getline(in_, line))
            fail(std::string("unexpected end of input, expected ") + what);
        ++line_no_;
        return std::istringstream(line);
    }

    template <typename T>
    T keyed(const char* key)
    {
        auto ls = next(key);
        std::string name;
        T value{};
        if (!(ls >> name >> value) || name != key)
            fail(std::string("expected '") + key + " <value>'");
        return value;
    }

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw InvalidArgument("read_channel: line " + std::to_string(line_no_) + ": " + msg);
    }

  private:
    std::istream& in_;
    int line_no_ = 0;
};

} // namespace

ChannelRecord read_channel(std::istream& in)
{
    LineReader reader(in);
    {
        auto ls = reader.next("header");
        std::string magic;
        int version = 0;
        if (!(ls >> magic >> version) || magic != "elaa-channel" || version != 1)
            reader.fail("expected 'elaa-channel 1'");
    }

    ArrayConfig cfg;
    cfg.n_antennas = reader.keyed<int>("n_antennas");
    const int n_users = reader.keyed<int>("n_users");
    cfg.n_subarrays = reader.keyed<int>("n_subarrays");
    cfg.carrier_freq = reader.keyed<double>("carrier_freq");
    ChannelRecord record;
    record.seed = reader.keyed<std::uint64_t>("seed");
    record.visibility_p = reader.keyed<double>("p");
    if (n_users < 1)
        reader.fail("n_users must be positive");
    try
    {
        cfg.validate();
    }
    catch (const InvalidArgument& e)
    {
        reader.fail(e.what());
    }

    std::vector<VisibilityRegion> regions;
    for (int k = 0; k < n_users; ++k)
    {
        auto ls = reader.next("vr line");
        std::string tag;
        int idx = -1;
        if (!(ls >> tag >> idx) || tag != "vr" || idx != k)
            reader.fail("expected 'vr " + std::to_string(k) + " ...'");
        std::vector<int> subs;
        int s = 0;
        while (ls >> s)
            subs.push_back(s);
        try
        {
            regions.emplace_back(std::move(subs), cfg);
        }
        catch (const InvalidArgument& e)
        {
            reader.fail(e.what());
        }
    }

    {
        auto ls = reader.next("data");
        std::string tag;
        if (!(ls >> tag) || tag != "data")
            reader.fail("expected 'data'");
    }

    CMatrix H(cfg.n_antennas, n_users);
    for (int n = 0; n < cfg.n_antennas; ++n)
    {
        auto ls = reader.next("data row");
        for (int k = 0; k < n_users; ++k)
        {
            double re = 0.0, im = 0.0;
            if (!(ls >> re >> im))
                reader.fail("expected " + std::to_string(n_users) + " complex pairs");
            H(n, k) = {re, im};
        }
    }

    try
    {
        record.channel = ChannelMatrix(cfg, std::move(H), std::move(regions));
    }
    catch (const IntegrityError& e)
    {
        // Keep the type: the numbers parsed fine but contradict the regions.
        throw IntegrityError("read_channel: " + std::string(e.what()));
    }
    catch (const std::logic_error& e)
    {
        reader.fail(e.what());
    }
    return record;
}

} // namespace elaa
