#include "thgame/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "thgame/errors.hpp"

namespace thgame {

namespace {

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

SimConfig cell_config(const ExperimentSpec& spec, GameKind kind, int m, int tau)
{
    SimConfig c = spec.base;
    c.kind = kind;
    c.m = m;
    c.tau = tau;
    return c;
}

} // namespace

void ExperimentSpec::validate() const
{
    if (kinds.empty())
        throw ConfigError("no game kinds selected");
    if (runs < 1)
        throw ConfigError("runs must be >= 1");
    base.validate();
    for (int m : m_range)
        StrategySpace(base.space, m);
    for (int t : tau_set)
        if (t < 1)
            throw ConfigError("tau must be >= 1");
}

QuenchedDisorder experiment_disorder(const ExperimentSpec& spec, int m)
{
    if (spec.disorder_file) {
        std::ifstream in(*spec.disorder_file);
        if (!in)
            throw ConfigError("cannot open disorder file '" + *spec.disorder_file + "'");
        QuenchedDisorder d = read_disorder(in);
        if (d.memory() != m)
            throw ConfigError("disorder file has m=" + std::to_string(d.memory()) +
                              " but m=" + std::to_string(m) + " was requested");
        return d;
    }
    Rng rng(derive_seed(spec.master_seed, "disorder", {static_cast<std::uint64_t>(m)}));
    return sample_quenched_disorder(spec.base.N, spec.base.S, m, spec.base.space, rng);
}

std::vector<GainRow> run_table1(const QuenchedDisorder& disorder, const SimConfig& base,
                                const std::vector<GameKind>& kinds, int restarts, unsigned workers)
{
    std::vector<GainRow> rows(2 * kinds.size());
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        SimConfig c = base;
        c.kind = kinds[i];
        c.m = disorder.memory();
        c.N = disorder.agent_count();
        c.S = disorder.strategies_per_agent();
        c.space = disorder.space();
        const GainReport numeric = restart_gains(c, disorder, restarts, workers);
        const AnalyticReport analytic = analyze(c.kind, disorder, c.tau, c.history_bit_flip);
        rows[2 * i] = {c.kind, c.m, c.tau, c.N, numeric.agent_gain, numeric.strategy_gain, "numeric"};
        rows[2 * i + 1] = {c.kind, c.m, c.tau, c.N, analytic.agent_gain, analytic.strategy_gain, "analytic"};
    }
    return rows;
}

std::vector<GainRow> run_table1(const ExperimentSpec& spec)
{
    spec.validate();
    const int m = spec.m_range.empty() ? spec.base.m : spec.m_range.front();
    SimConfig base = spec.base;
    base.tau = spec.tau_set.empty() ? spec.base.tau : spec.tau_set.front();
    base.seed = derive_seed(spec.master_seed, "table1", {});
    return run_table1(experiment_disorder(spec, m), base, spec.kinds, spec.runs, spec.workers);
}

std::vector<SweepRow> run_illusion_sweep(const ExperimentSpec& spec)
{
    spec.validate();
    std::vector<SweepRow> rows;
    for (GameKind kind : spec.kinds)
        for (int tau : spec.tau_set)
            for (int m : spec.m_range) {
                SimConfig c = cell_config(spec, kind, m, tau);
                c.seed = derive_seed(spec.master_seed, "sweep",
                                     {static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(tau)});
                rows.push_back({kind, m, tau, ensemble_gains(c, spec.runs, spec.workers), c});
            }
    return rows;
}

std::vector<CagentRow> run_counteradaptive(const ExperimentSpec& spec)
{
    spec.validate();
    if (spec.base.n_counteradaptive < 1 || spec.base.n_counteradaptive >= spec.base.N)
        throw ConfigError("counteradaptive experiment needs 1 <= n_c < N");
    std::vector<CagentRow> rows;
    for (GameKind kind : spec.kinds)
        for (int tau : spec.tau_set)
            for (int m : spec.m_range) {
                SimConfig c = cell_config(spec, kind, m, tau);
                c.seed = derive_seed(spec.master_seed, "cagents",
                                     {static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(tau)});
                rows.push_back({kind, m, tau, ensemble_gains(c, spec.runs, spec.workers), c});
            }
    return rows;
}

std::vector<GridCell> run_persistence_grid(const ExperimentSpec& spec)
{
    spec.validate();
    if (spec.m_range.empty())
        return {};
    GridSpec g;
    g.kinds = spec.kinds;
    g.m_range = spec.m_range;
    g.scale_range = spec.scale_range;
    g.runs = spec.runs;
    g.length = spec.base.steps;
    g.base = spec.base;
    if (!spec.tau_set.empty())
        g.base.tau = spec.tau_set.front();
    g.master_seed = spec.master_seed;
    g.workers = spec.workers;
    return persistence_grid(g);
}

std::vector<GainRow> run_analytic(const ExperimentSpec& spec)
{
    spec.validate();
    std::vector<GainRow> rows;
    for (int m : spec.m_range) {
        const QuenchedDisorder d = experiment_disorder(spec, m);
        for (int tau : spec.tau_set)
            for (GameKind kind : spec.kinds) {
                const AnalyticReport a = analyze(kind, d, tau, spec.base.history_bit_flip);
                rows.push_back({kind, m, tau, d.agent_count(), a.agent_gain, a.strategy_gain, "analytic"});
                if (spec.with_numeric) {
                    SimConfig c = cell_config(spec, kind, m, tau);
                    c.N = d.agent_count();
                    c.S = d.strategies_per_agent();
                    c.seed = derive_seed(spec.master_seed, "numeric",
                                         {static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(tau)});
                    const GainReport r = restart_gains(c, d, spec.runs, spec.workers);
                    rows.push_back({kind, m, tau, c.N, r.agent_gain, r.strategy_gain, "numeric"});
                }
            }
    }
    return rows;
}

void write_gain_csv(std::ostream& out, const std::vector<GainRow>& rows)
{
    out << "kind,m,tau,N,agent_gain,strategy_gain,source\n";
    for (const auto& r : rows)
        out << to_string(r.kind) << ',' << r.m << ',' << r.tau << ',' << r.N << ',' << fmt(r.agent_gain)
            << ',' << fmt(r.strategy_gain) << ',' << r.source << '\n';
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows)
{
    out << "kind,m,tau,agent_gain,agent_se,strategy_gain,strategy_se,N,S,runs,steps,warmup,seed\n";
    for (const auto& r : rows)
        out << to_string(r.kind) << ',' << r.m << ',' << r.tau << ',' << fmt(r.gains.agent_gain) << ','
            << fmt(r.gains.agent_se) << ',' << fmt(r.gains.strategy_gain) << ',' << fmt(r.gains.strategy_se)
            << ',' << r.config.N << ',' << r.config.S << ',' << r.gains.runs << ',' << r.config.steps << ','
            << r.config.warmup << ',' << r.config.seed << '\n';
}

void write_cagent_csv(std::ostream& out, const std::vector<CagentRow>& rows)
{
    out << "kind,m,tau,diff,diff_se,c_gain,s_gain,N,S,n_c,runs,steps,warmup,seed\n";
    for (const auto& r : rows)
        out << to_string(r.kind) << ',' << r.m << ',' << r.tau << ',' << fmt(r.gains.c_minus_s) << ','
            << fmt(r.gains.c_minus_s_se) << ',' << fmt(r.gains.c_gain) << ',' << fmt(r.gains.s_gain) << ','
            << r.config.N << ',' << r.config.S << ',' << r.config.n_counteradaptive << ',' << r.gains.runs
            << ',' << r.config.steps << ',' << r.config.warmup << ',' << r.config.seed << '\n';
}

void write_grid_csv(std::ostream& out, const std::vector<GridCell>& cells, const ExperimentSpec& spec)
{
    const int tau = spec.tau_set.empty() ? spec.base.tau : spec.tau_set.front();
    out << "kind,m,scale,persistence,stderr,tau,N,S,runs,length,seed\n";
    for (const auto& c : cells)
        out << to_string(c.kind) << ',' << c.m << ',' << c.scale << ',' << fmt(c.persistence) << ','
            << fmt(c.stderr_) << ',' << tau << ',' << spec.base.N << ',' << spec.base.S << ',' << spec.runs
            << ',' << spec.base.steps << ',' << spec.master_seed << '\n';
}

void write_run_csv(std::ostream& out, const RunResult& result)
{
    out << "step,A,bit\n";
    for (std::size_t t = 0; t < result.aggregate.size(); ++t)
        out << t << ',' << result.aggregate[t] << ',' << int(result.bit_series[t]) << '\n';
}

std::string run_experiment(const ExperimentSpec& spec)
{
    std::ostringstream out;
    switch (spec.experiment) {
    case Experiment::table1:
        write_gain_csv(out, run_table1(spec));
        break;
    case Experiment::illusion_sweep:
        write_sweep_csv(out, run_illusion_sweep(spec));
        break;
    case Experiment::counteradaptive:
        write_cagent_csv(out, run_counteradaptive(spec));
        break;
    case Experiment::persistence_grid:
        write_grid_csv(out, run_persistence_grid(spec), spec);
        break;
    case Experiment::analytic_vs_numeric:
        write_gain_csv(out, run_analytic(spec));
        break;
    }
    return out.str();
}

} // namespace thgame
