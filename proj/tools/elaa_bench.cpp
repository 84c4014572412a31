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

// Benchmark harness: one subcommand per figure sweep, CSV on stdout or --out.

#include "elaa/channel_io.hpp"
#include "elaa/experiment.hpp"
#include "elaa/vr_graph.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

namespace
{

using namespace elaa;

struct Options
{
    std::string config;
    std::string preset;
    std::string out;
    std::vector<std::string> schemes;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<int> n_seeds;
};

ExperimentConfig resolve(const Options& o)
{
    ExperimentConfig cfg = o.preset.empty() ? ExperimentConfig::desk() : ExperimentConfig::from_preset(o.preset);
    if (!o.config.empty())
        cfg = load_config(o.config, cfg);
    for (const auto& kv : o.overrides)
    {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!o.schemes.empty())
    {
        std::string joined;
        for (const auto& s : o.schemes)
            joined += (joined.empty() ? "" : ",") + s;
        cfg.set("schemes", joined);
    }
    if (o.seed)
        cfg.seed = *o.seed;
    if (o.n_seeds)
        cfg.n_seeds = *o.n_seeds;
    cfg.validate();
    return cfg;
}

template <typename Fn>
void emit(const std::string& path, Fn&& write)
{
    if (path.empty() || path == "-")
    {
        write(std::cout);
        return;
    }
    std::ofstream f(path);
    if (!f)
        throw InvalidArgument("cannot write '" + path + "'");
    write(f);
    if (!f)
        throw std::runtime_error("write to '" + path + "' failed");
}

using Runner = CsvTable (*)(const ExperimentConfig&);

const std::vector<std::pair<std::string, Runner>>& figures()
{
    static const std::vector<std::pair<std::string, Runner>> f = {
        {"convergence", run_convergence}, {"rate-snr", run_rate_vs_snr}, {"rate-nt", run_rate_vs_nt},
        {"flops-k", run_flops_vs_k},      {"flops-nt", run_flops_vs_nt}, {"flops-p", run_flops_vs_p},
    };
    return f;
}

void add_common(CLI::App* cmd, Options& o)
{
    cmd->add_option("--config", o.config, "key=value configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--preset", o.preset, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
    cmd->add_option("--seed", o.seed, "first seed of the sweep");
    cmd->add_option("--seeds", o.n_seeds, "number of seeds");
    cmd->add_option("--scheme", o.schemes, "scheme name, repeatable or comma separated")->delimiter(',');
    cmd->add_option("--set", o.overrides, "extra key=value assignment, repeatable");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Kaczmarz-type precoder benchmark harness for near-field ELAA systems"};
    app.require_subcommand(1);
    Options o;
    std::string subcommand;

    for (const auto& [name, runner] : figures())
    {
        auto* cmd = app.add_subcommand(name, "write the " + name + " sweep as CSV");
        add_common(cmd, o);
        cmd->add_option("--out", o.out, "output CSV path (default stdout)");
    }
    auto* all = app.add_subcommand("all", "write every sweep into a directory");
    add_common(all, o);
    all->add_option("--out", o.out, "output directory")->required();

    auto* channel = app.add_subcommand("channel", "write one channel realization");
    add_common(channel, o);
    channel->add_option("--out", o.out, "output path (default stdout)");
    auto* partition = app.add_subcommand("partition", "dump the user partition of one realization");
    add_common(partition, o);
    partition->add_option("--out", o.out, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try
    {
        const ExperimentConfig cfg = resolve(o);
        for (const auto& [name, runner] : figures())
            if (app.got_subcommand(name))
            {
                const CsvTable t = runner(cfg);
                emit(o.out, [&](std::ostream& out) { write_csv(out, t, cfg); });
                return 0;
            }
        if (app.got_subcommand(all))
        {
            std::filesystem::create_directories(o.out);
            for (const auto& [name, runner] : figures())
            {
                const CsvTable t = runner(cfg);
                const auto path = (std::filesystem::path(o.out) / (name + ".csv")).string();
                emit(path, [&](std::ostream& out) { write_csv(out, t, cfg); });
                std::cerr << "wrote " << path << '\n';
            }
            return 0;
        }

        Rng rng = make_stream(cfg.seed, 0);
        const ChannelMatrix raw = generate_channel(cfg.array(), cfg.scenario(), rng);
        if (app.got_subcommand(channel))
        {
            ChannelRecord rec{power_control(raw, cfg.snr_db).channel, cfg.seed, cfg.visibility_p};
            emit(o.out, [&](std::ostream& out) { write_channel(out, rec); });
        }
        else
        {
            const UserPartition part = build_partition(raw.regions());
            emit(o.out, [&](std::ostream& out) { write_partition(out, raw.regions(), part); });
        }
        return 0;
    }
    catch (const std::exception& e)
    {
        std::cerr << "elaa_bench: " << e.what() << '\n';
        return 2;
    }
}
