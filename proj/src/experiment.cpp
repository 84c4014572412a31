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

#include "elaa/experiment.hpp"

#include "elaa/parallel.hpp"
#include "elaa/rzf_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace elaa
{

namespace
{

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value)
{
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

long long parse_int(const std::string& key, const std::string& v)
{
    std::size_t used = 0;
    long long x = 0;
    try
    {
        x = std::stoll(v, &used);
    }
    catch (const std::exception&)
    {
        used = 0;
    }
    if (used == 0 || used != v.size())
        throw InvalidArgument("config: '" + key + "' expects an integer, got '" + v + "'");
    return x;
}

double parse_double(const std::string& key, const std::string& v)
{
    std::size_t used = 0;
    double x = 0;
    try
    {
        x = std::stod(v, &used);
    }
    catch (const std::exception&)
    {
        used = 0;
    }
    if (used == 0 || used != v.size())
        throw InvalidArgument("config: '" + key + "' expects a number, got '" + v + "'");
    return x;
}

std::string fmt(double x)
{
    if (std::isnan(x))
        return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::string fmt_exact(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& xs, F&& f)
{
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i)
        out += (i ? "," : "") + f(xs[i]);
    return out;
}

std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

// ------------------------------------------------------------------------
// Configuration

ExperimentConfig ExperimentConfig::desk() { return {}; }

ExperimentConfig ExperimentConfig::paper()
{
    ExperimentConfig c;
    c.preset = "paper";
    c.n_antennas = 2000;
    c.n_users = 30;
    c.n_subarrays = 20;
    c.carrier_freq = 100e9;
    c.visibility_p = 0.35;
    c.n_paths = 5;
    c.snr_db = 0.0;
    c.epsilon = 1e-6;
    c.nt_sweep = {500, 1000, 1500, 2000, 2500};
    c.k_sweep = {10, 15, 20, 25, 30, 35, 40};
    return c;
}

ExperimentConfig ExperimentConfig::from_preset(const std::string& name)
{
    if (name == "desk")
        return desk();
    if (name == "paper")
        return paper();
    throw InvalidArgument("unknown preset '" + name + "' (expected desk or paper)");
}

void ExperimentConfig::set(const std::string& key, const std::string& raw)
{
    const std::string v = trim(raw);
    if (key == "preset")
    {
        const int w = workers;
        *this = from_preset(v);
        workers = w;
    }
    else if (key == "n_antennas")
        n_antennas = static_cast<int>(parse_int(key, v));
    else if (key == "n_users")
        n_users = static_cast<int>(parse_int(key, v));
    else if (key == "n_subarrays")
        n_subarrays = static_cast<int>(parse_int(key, v));
    else if (key == "carrier_freq")
        carrier_freq = parse_double(key, v);
    else if (key == "visibility_p")
        visibility_p = parse_double(key, v);
    else if (key == "n_paths")
        n_paths = static_cast<int>(parse_int(key, v));
    else if (key == "snr_db")
        snr_db = parse_double(key, v);
    else if (key == "snr_sweep" || key == "p_sweep")
    {
        std::vector<double> xs;
        for (const auto& item : split_list(v))
            xs.push_back(parse_double(key, item));
        (key == "snr_sweep" ? snr_sweep : p_sweep) = std::move(xs);
    }
    else if (key == "nt_sweep" || key == "k_sweep")
    {
        std::vector<int> xs;
        for (const auto& item : split_list(v))
            xs.push_back(static_cast<int>(parse_int(key, item)));
        (key == "nt_sweep" ? nt_sweep : k_sweep) = std::move(xs);
    }
    else if (key == "schemes")
    {
        schemes.clear();
        if (v == "all")
            schemes.assign(all_schemes().begin(), all_schemes().end());
        else
            for (const auto& item : split_list(v))
                schemes.push_back(parse_scheme(item));
    }
    else if (key == "epsilon")
        epsilon = parse_double(key, v);
    else if (key == "max_iterations")
        max_iterations = parse_int(key, v);
    else if (key == "fixed_iterations")
        fixed_iterations = parse_int(key, v);
    else if (key == "seed")
    {
        const long long s = parse_int(key, v);
        if (s < 0)
            throw InvalidArgument("config: seed must be non-negative");
        seed = static_cast<std::uint64_t>(s);
    }
    else if (key == "n_seeds")
        n_seeds = static_cast<int>(parse_int(key, v));
    else if (key == "workers")
        workers = static_cast<int>(parse_int(key, v));
    else
        throw InvalidArgument("config: unknown key '" + key + "'");
}

void ExperimentConfig::validate() const
{
    auto fail = [](const std::string& msg) { throw InvalidArgument("config: " + msg); };
    auto check_array = [&](int nt, int k, const std::string& where) {
        if (nt <= 0 || n_subarrays <= 0)
            fail(where + "n_antennas and n_subarrays must be positive");
        if (nt % n_subarrays != 0)
            fail(where + "n_subarrays (" + std::to_string(n_subarrays) + ") must divide n_antennas (" +
                 std::to_string(nt) + ")");
        if (k < 1)
            fail(where + "n_users must be at least 1");
        if (k > nt)
            fail(where + "n_users (" + std::to_string(k) + ") exceeds n_antennas (" + std::to_string(nt) + ")");
    };
    check_array(n_antennas, n_users, "");
    for (int nt : nt_sweep)
        check_array(nt, n_users, "nt_sweep point " + std::to_string(nt) + ": ");
    for (int k : k_sweep)
        check_array(n_antennas, k, "k_sweep point " + std::to_string(k) + ": ");
    auto check_p = [&](double p) {
        if (!(p > 0.0 && p <= 1.0))
            fail("visibility probability must lie in (0, 1]");
    };
    check_p(visibility_p);
    for (double p : p_sweep)
        check_p(p);
    if (!(carrier_freq > 0.0) || !std::isfinite(carrier_freq))
        fail("carrier_freq must be positive");
    if (n_paths < 1)
        fail("n_paths must be at least 1");
    if (!std::isfinite(snr_db))
        fail("snr_db must be finite");
    for (double s : snr_sweep)
        if (!std::isfinite(s))
            fail("snr_sweep entries must be finite");
    if (!(epsilon > 0.0))
        fail("epsilon must be positive");
    if (max_iterations < 0)
        fail("max_iterations must be non-negative");
    if (fixed_iterations < 1)
        fail("fixed_iterations must be at least 1");
    if (n_seeds < 1)
        fail("n_seeds must be at least 1");
    if (schemes.empty())
        fail("at least one scheme required");
    if (snr_sweep.empty() || nt_sweep.empty() || k_sweep.empty() || p_sweep.empty())
        fail("sweeps must be non-empty");
}

std::string ExperimentConfig::canonical() const
{
    std::map<std::string, std::string> kv;
    kv["preset"] = preset;
    kv["n_antennas"] = std::to_string(n_antennas);
    kv["n_users"] = std::to_string(n_users);
    kv["n_subarrays"] = std::to_string(n_subarrays);
    kv["carrier_freq"] = fmt_exact(carrier_freq);
    kv["visibility_p"] = fmt_exact(visibility_p);
    kv["n_paths"] = std::to_string(n_paths);
    kv["snr_db"] = fmt_exact(snr_db);
    kv["snr_sweep"] = join(snr_sweep, fmt_exact);
    kv["nt_sweep"] = join(nt_sweep, [](int x) { return std::to_string(x); });
    kv["k_sweep"] = join(k_sweep, [](int x) { return std::to_string(x); });
    kv["p_sweep"] = join(p_sweep, fmt_exact);
    kv["schemes"] = join(schemes, [](Scheme s) { return std::string(scheme_name(s)); });
    kv["epsilon"] = fmt_exact(epsilon);
    kv["max_iterations"] = std::to_string(max_iterations);
    kv["fixed_iterations"] = std::to_string(fixed_iterations);
    kv["seed"] = std::to_string(seed);
    kv["n_seeds"] = std::to_string(n_seeds);
    std::string out;
    for (const auto& [k, v] : kv)
        out += k + "=" + v + ";";
    return out;
}

std::string ExperimentConfig::fingerprint() const
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical())));
    return buf;
}

ArrayConfig ExperimentConfig::array() const
{
    ArrayConfig a;
    a.n_antennas = n_antennas;
    a.carrier_freq = carrier_freq;
    a.n_subarrays = n_subarrays;
    return a;
}

ScenarioParams ExperimentConfig::scenario() const
{
    ScenarioParams p;
    p.n_users = n_users;
    p.n_paths = n_paths;
    p.visibility_p = visibility_p;
    return p;
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base)
{
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key=value");
        try
        {
            base.set(trim(line.substr(0, eq)), line.substr(eq + 1));
        }
        catch (const InvalidArgument& e)
        {
            throw InvalidArgument("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidArgument("cannot open config file '" + path + "'");
    return parse_config(in, std::move(base));
}

// ------------------------------------------------------------------------
// CSV

void write_csv(std::ostream& out, const CsvTable& table, const ExperimentConfig& cfg)
{
    const std::string fp = cfg.fingerprint();
    out << "# elaa-bench " << table.figure << '\n';
    out << "# config " << cfg.canonical() << '\n';
    out << "# fingerprint " << fp << '\n';
    for (const auto& m : table.metadata)
        out << "# " << m << '\n';
    out << kCsvColumns << '\n';
    for (const auto& r : table.rows)
    {
        out << fp << '-' << r.seed << ',' << r.scheme << ',' << r.seed << ',' << r.n_antennas << ',' << r.n_users
            << ',' << r.n_subarrays << ',' << fmt(r.visibility_p) << ',' << fmt(r.snr_db) << ',' << fmt(r.iter)
            << ',' << fmt(r.nmse) << ',' << fmt(r.resid) << ',' << fmt(r.flops_measured) << ','
            << fmt(r.flops_analytic) << ',' << fmt(r.sum_rate) << '\n';
    }
}

// ------------------------------------------------------------------------
// Runs

Instance make_instance(const ExperimentConfig& cfg, std::uint64_t seed, double snr_db)
{
    Rng rng = make_stream(seed, 0);
    const ChannelMatrix raw = generate_channel(cfg.array(), cfg.scenario(), rng);
    PowerControlled pc = power_control(raw, snr_db);
    Instance inst;
    inst.seed = seed;
    inst.snr_db = snr_db;
    auto sys = std::make_shared<AugmentedSystem>(std::move(pc.channel), pc.xi);
    inst.sub = std::make_shared<SubarrayChannel>(sys->channel(), sys->partition());
    inst.stats = realized_vr_stats(sys->channel(), sys->partition());
    inst.f_rzf = rzf_precoder(sys->H(), sys->xi()).F;
    inst.sys = std::move(sys);
    return inst;
}

namespace
{

std::uint64_t solver_seed(std::uint64_t seed, Scheme scheme)
{
    return seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(scheme) + 1;
}

double analytic_for(Scheme scheme, const Instance& inst, double total_steps)
{
    const auto f = formula_for(scheme);
    if (!f)
        return kNaN;
    return analytic_flops(*f, inst.sys->n_antennas(), inst.sys->n_users(), total_steps, inst.stats);
}

CsvRow base_row(const Instance& inst, const std::string& scheme, double p)
{
    CsvRow r;
    r.scheme = scheme;
    r.seed = std::to_string(inst.seed);
    r.n_antennas = inst.sys->n_antennas();
    r.n_users = inst.sys->n_users();
    r.n_subarrays = inst.sys->channel().config().n_subarrays;
    r.visibility_p = p;
    r.snr_db = inst.snr_db;
    return r;
}

} // namespace

RunTrace run_scheme(const ExperimentConfig& cfg, const Instance& inst, Scheme scheme, std::int64_t fixed,
                    bool keep_trace)
{
    const AugmentedSystem& sys = *inst.sys;
    const bool vr = is_vr_aware(scheme);
    auto metric = [&](const CMatrix& V) {
        if (V.isZero(0.0))
            return 1.0;
        CMatrix F = vr ? product_vr(*inst.sub, V) : product_dense(sys.H(), V);
        return nmse(normalize_precoder(std::move(F), "").F, inst.f_rzf);
    };

    LockstepOptions opt;
    opt.tolerance = cfg.epsilon;
    opt.max_iterations = cfg.max_iterations;
    opt.fixed_iterations = fixed;
    const LockstepResult res = solve_lockstep(scheme, sys, opt, solver_seed(inst.seed, scheme), metric);

    FlopCounter assembly;
    const Precoder P = vr ? assemble_vr(*inst.sub, res.V, &assembly) : assemble_dense(sys.H(), res.V, &assembly);

    RunTrace out;
    out.scheme = std::string(scheme_name(scheme));
    out.iterations = res.iterations;
    out.total_steps = res.total_steps;
    out.converged = res.converged;
    out.flops_measured = static_cast<double>(res.flops.total() + assembly.total());
    out.flops_analytic = analytic_for(scheme, inst, static_cast<double>(res.total_steps));
    out.sum_rate = spectral_efficiency(sys.H(), P.F, db_to_linear(inst.snr_db)).sum;
    out.F = P.F;
    if (keep_trace)
        for (const auto& p : res.trace)
        {
            RunTracePoint tp;
            tp.iteration = p.iteration;
            tp.nmse = p.metric;
            tp.residual = p.residual;
            tp.flops_measured = static_cast<double>(p.flops + assembly.total());
            tp.flops_analytic = analytic_for(scheme, inst, static_cast<double>(p.total_steps));
            out.points.push_back(tp);
        }
    return out;
}

namespace
{

const std::vector<std::string> kUnitNotes = {
    "iteration_unit one selection and projection per right-hand side for URK, SWOR-ERK, GK, GRK and VR-OGRK; "
    "one aggregated projection for AHK; one orthogonal block step plus one aggregated step for VR-OAHK",
    "iter counts lockstep rounds: every one of the K right-hand sides advances one iteration per round and the "
    "NMSE against the direct RZF precoder is checked after each round",
    "flops_analytic evaluates the closed-form counts with T equal to the iterations summed over right-hand sides "
    "and the realized visibility statistics; AHK has no closed form (nan)",
    "flops_measured is the kernel tally (complex mul 6, add 2, times real 2, |z|^2 3) plus precoder assembly",
};

std::vector<std::uint64_t> seed_list(const ExperimentConfig& cfg)
{
    std::vector<std::uint64_t> s(static_cast<std::size_t>(cfg.n_seeds));
    for (int j = 0; j < cfg.n_seeds; ++j)
        s[static_cast<std::size_t>(j)] = cfg.seed + static_cast<std::uint64_t>(j);
    return s;
}

int workers_for(const ExperimentConfig& cfg) { return cfg.workers > 0 ? cfg.workers : default_workers(); }

// Runs `task(seed_index)` over the seeds and concatenates the rows in
// seed order.
template <typename Task>
std::vector<CsvRow> fan_out(const ExperimentConfig& cfg, int n, Task&& task)
{
    std::vector<std::vector<CsvRow>> parts(static_cast<std::size_t>(n));
    parallel_for(n, workers_for(cfg), [&](int j) { parts[static_cast<std::size_t>(j)] = task(j); });
    std::vector<CsvRow> rows;
    for (auto& p : parts)
        rows.insert(rows.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
    return rows;
}

// Seed-averaged rows: mean of every numeric column over rows sharing
// (scheme, N_t, K, S, p, snr_db, iter). Groups keep first-appearance order.
std::vector<CsvRow> mean_rows(const std::vector<CsvRow>& rows)
{
    struct Acc
    {
        CsvRow row;
        int n = 0;
    };
    std::vector<Acc> groups;
    auto same = [](const CsvRow& a, const CsvRow& b) {
        return a.scheme == b.scheme && a.n_antennas == b.n_antennas && a.n_users == b.n_users &&
               a.n_subarrays == b.n_subarrays && a.visibility_p == b.visibility_p && a.snr_db == b.snr_db &&
               a.iter == b.iter;
    };
    for (const auto& r : rows)
    {
        auto it = std::find_if(groups.begin(), groups.end(), [&](const Acc& g) { return same(g.row, r); });
        if (it == groups.end())
        {
            groups.push_back({r, 1});
            groups.back().row.seed = "mean";
            continue;
        }
        it->row.nmse += r.nmse;
        it->row.resid += r.resid;
        it->row.flops_measured += r.flops_measured;
        it->row.flops_analytic += r.flops_analytic;
        it->row.sum_rate += r.sum_rate;
        ++it->n;
    }
    std::vector<CsvRow> out;
    for (auto& g : groups)
    {
        g.row.nmse /= g.n;
        g.row.resid /= g.n;
        g.row.flops_measured /= g.n;
        g.row.flops_analytic /= g.n;
        g.row.sum_rate /= g.n;
        out.push_back(g.row);
    }
    return out;
}

// Averages over seeds where the sweep iterations differ per seed: one mean
// row per (scheme, sweep point), `iter` averaged as well.
std::vector<CsvRow> mean_rows_over_iter(const std::vector<CsvRow>& rows)
{
    std::vector<CsvRow> stripped = rows;
    std::map<std::string, std::pair<double, int>> iters;
    auto key = [](const CsvRow& r) {
        return r.scheme + "|" + std::to_string(r.n_antennas) + "|" + std::to_string(r.n_users) + "|" +
               fmt_exact(r.visibility_p) + "|" + fmt_exact(r.snr_db);
    };
    for (auto& r : stripped)
    {
        auto& acc = iters[key(r)];
        acc.first += r.iter;
        ++acc.second;
        r.iter = 0;
    }
    auto out = mean_rows(stripped);
    for (auto& r : out)
    {
        const auto& acc = iters[key(r)];
        r.iter = acc.first / acc.second;
    }
    return out;
}

CsvRow rzf_row(const Instance& inst, double p)
{
    CsvRow r = base_row(inst, "RZF", p);
    r.nmse = 0.0;
    r.resid = 0.0;
    r.flops_measured = kNaN;
    r.flops_analytic = analytic_flops(FlopFormula::RZF, inst.sys->n_antennas(), inst.sys->n_users(), 0);
    r.sum_rate = spectral_efficiency(inst.sys->H(), inst.f_rzf, db_to_linear(inst.snr_db)).sum;
    return r;
}

CsvRow mrc_row(const Instance& inst, double p)
{
    CsvRow r = base_row(inst, "MRC", p);
    const CMatrix F = mrc_precoder(inst.sys->H()).F;
    r.nmse = nmse(F, inst.f_rzf);
    r.resid = kNaN;
    r.flops_measured = kNaN;
    r.flops_analytic = kNaN;
    r.sum_rate = spectral_efficiency(inst.sys->H(), F, db_to_linear(inst.snr_db)).sum;
    return r;
}

CsvRow final_row(const Instance& inst, const RunTrace& t, double p)
{
    CsvRow r = base_row(inst, t.scheme, p);
    r.iter = static_cast<double>(t.iterations);
    r.nmse = nmse(t.F, inst.f_rzf);
    r.resid = kNaN;
    r.flops_measured = t.flops_measured;
    r.flops_analytic = t.flops_analytic;
    r.sum_rate = t.sum_rate;
    return r;
}

// Rate figure: every scheme at the fixed iteration count plus RZF and MRC.
std::vector<CsvRow> rate_rows(const ExperimentConfig& cfg, std::uint64_t seed, double snr)
{
    const Instance inst = make_instance(cfg, seed, snr);
    std::vector<CsvRow> rows{rzf_row(inst, cfg.visibility_p), mrc_row(inst, cfg.visibility_p)};
    for (Scheme s : cfg.schemes)
        rows.push_back(final_row(inst, run_scheme(cfg, inst, s, cfg.fixed_iterations, false), cfg.visibility_p));
    return rows;
}

// Complexity figure: every scheme run to epsilon plus the RZF closed form.
std::vector<CsvRow> flops_rows(const ExperimentConfig& cfg, std::uint64_t seed)
{
    const Instance inst = make_instance(cfg, seed, cfg.snr_db);
    std::vector<CsvRow> rows{rzf_row(inst, cfg.visibility_p)};
    for (Scheme s : cfg.schemes)
        rows.push_back(final_row(inst, run_scheme(cfg, inst, s, 0, false), cfg.visibility_p));
    return rows;
}

template <typename Point, typename Apply>
CsvTable sweep(const ExperimentConfig& cfg, const std::string& figure, const std::vector<Point>& points,
               Apply&& apply, bool rate)
{
    cfg.validate();
    const auto seeds = seed_list(cfg);
    const int n = static_cast<int>(points.size() * seeds.size());
    CsvTable t;
    t.figure = figure;
    t.metadata = kUnitNotes;
    if (rate)
        t.metadata.push_back("rate rows run every scheme for exactly " + std::to_string(cfg.fixed_iterations) +
                             " rounds");
    t.rows = fan_out(cfg, n, [&](int task) {
        const auto& point = points[static_cast<std::size_t>(task) / seeds.size()];
        const std::uint64_t seed = seeds[static_cast<std::size_t>(task) % seeds.size()];
        ExperimentConfig local = cfg;
        const double snr = apply(local, point);
        return rate ? rate_rows(local, seed, snr) : flops_rows(local, seed);
    });
    const auto means = rate ? mean_rows(t.rows) : mean_rows_over_iter(t.rows);
    t.rows.insert(t.rows.end(), means.begin(), means.end());
    return t;
}

} // namespace

CsvTable run_convergence(const ExperimentConfig& cfg)
{
    cfg.validate();
    const auto seeds = seed_list(cfg);
    CsvTable t;
    t.figure = "convergence";
    t.metadata = kUnitNotes;
    t.rows = fan_out(cfg, static_cast<int>(seeds.size()), [&](int j) {
        const Instance inst = make_instance(cfg, seeds[static_cast<std::size_t>(j)], cfg.snr_db);
        std::vector<CsvRow> rows;
        for (Scheme s : cfg.schemes)
        {
            const RunTrace tr = run_scheme(cfg, inst, s, 0, true);
            for (std::size_t i = 0; i < tr.points.size(); ++i)
            {
                const auto& p = tr.points[i];
                CsvRow r = base_row(inst, tr.scheme, cfg.visibility_p);
                r.iter = static_cast<double>(p.iteration);
                r.nmse = p.nmse;
                r.resid = p.residual;
                r.flops_measured = p.flops_measured;
                r.flops_analytic = p.flops_analytic;
                r.sum_rate = i + 1 == tr.points.size() ? tr.sum_rate : kNaN;
                rows.push_back(r);
            }
        }
        return rows;
    });

    // Seed average with each trace held at its last value once it stopped.
    std::vector<CsvRow> padded;
    for (Scheme s : cfg.schemes)
    {
        const std::string name(scheme_name(s));
        std::vector<std::vector<const CsvRow*>> per_seed;
        for (const auto& r : t.rows)
            if (r.scheme == name)
            {
                if (r.iter == 0)
                    per_seed.emplace_back();
                per_seed.back().push_back(&r);
            }
        std::size_t len = 0;
        for (const auto& v : per_seed)
            len = std::max(len, v.size());
        for (const auto& v : per_seed)
            for (std::size_t i = 0; i < len; ++i)
            {
                CsvRow r = *v[std::min(i, v.size() - 1)];
                r.iter = static_cast<double>(i);
                r.sum_rate = kNaN;
                padded.push_back(r);
            }
    }
    const auto means = mean_rows(padded);
    t.rows.insert(t.rows.end(), means.begin(), means.end());
    return t;
}

CsvTable run_rate_vs_snr(const ExperimentConfig& cfg)
{
    return sweep(cfg, "rate-snr", cfg.snr_sweep, [](ExperimentConfig&, double snr) { return snr; }, true);
}

CsvTable run_rate_vs_nt(const ExperimentConfig& cfg)
{
    return sweep(
        cfg, "rate-nt", cfg.nt_sweep,
        [](ExperimentConfig& c, int nt) {
            c.n_antennas = nt;
            return c.snr_db;
        },
        true);
}

CsvTable run_flops_vs_k(const ExperimentConfig& cfg)
{
    return sweep(
        cfg, "flops-k", cfg.k_sweep,
        [](ExperimentConfig& c, int k) {
            c.n_users = k;
            return c.snr_db;
        },
        false);
}

CsvTable run_flops_vs_nt(const ExperimentConfig& cfg)
{
    return sweep(
        cfg, "flops-nt", cfg.nt_sweep,
        [](ExperimentConfig& c, int nt) {
            c.n_antennas = nt;
            return c.snr_db;
        },
        false);
}

CsvTable run_flops_vs_p(const ExperimentConfig& cfg)
{
    return sweep(
        cfg, "flops-p", cfg.p_sweep,
        [](ExperimentConfig& c, double p) {
            c.visibility_p = p;
            return c.snr_db;
        },
        false);
}

} // namespace elaa
