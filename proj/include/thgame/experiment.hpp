#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "thgame/game_engine.hpp"
#include "thgame/markov_analytics.hpp"
#include "thgame/persistence.hpp"

namespace thgame {

enum class Experiment { table1, illusion_sweep, counteradaptive, persistence_grid, analytic_vs_numeric };

/*
 * Everything needed to reproduce one experiment. Per-run seeds are derived
 * from master_seed with derive_seed(master, <experiment tag>, {coordinates});
 * game kinds never enter the derivation, so every kind of a sweep cell runs on
 * the same ensemble of disorders.
 */
struct ExperimentSpec {
    Experiment experiment = Experiment::illusion_sweep;
    SimConfig base;
    std::vector<int> m_range;
    std::vector<int> tau_set;
    std::vector<GameKind> kinds;
    std::vector<int> scale_range;
    int runs = 50;
    std::string output;
    std::uint64_t master_seed = 0;
    std::optional<std::string> disorder_file;
    /// analytic_vs_numeric: also simulate each disorder and emit numeric rows.
    bool with_numeric = false;
    unsigned workers = 0;

    void validate() const;
};

/// Row of the shared analytic/numeric schema: kind,m,tau,N,agent_gain,strategy_gain,source.
struct GainRow {
    GameKind kind = GameKind::minority;
    int m = 0;
    int tau = 0;
    int N = 0;
    double agent_gain = 0;
    double strategy_gain = 0;
    std::string source;
};

struct SweepRow {
    GameKind kind = GameKind::minority;
    int m = 0;
    int tau = 0;
    GainReport gains;
    SimConfig config;
};

struct CagentRow {
    GameKind kind = GameKind::minority;
    int m = 0;
    int tau = 0;
    GainReport gains;
    SimConfig config;
};

/// Numeric (restart ensemble, base.steps measured steps each) and analytic gains on one disorder.
std::vector<GainRow> run_table1(const QuenchedDisorder& disorder, const SimConfig& base,
                                const std::vector<GameKind>& kinds, int restarts, unsigned workers = 0);
std::vector<GainRow> run_table1(const ExperimentSpec& spec);

std::vector<SweepRow> run_illusion_sweep(const ExperimentSpec& spec);
std::vector<CagentRow> run_counteradaptive(const ExperimentSpec& spec);
std::vector<GridCell> run_persistence_grid(const ExperimentSpec& spec);
std::vector<GainRow> run_analytic(const ExperimentSpec& spec);

/// Disorder used by table1/analytic when no file is supplied.
QuenchedDisorder experiment_disorder(const ExperimentSpec& spec, int m);

void write_gain_csv(std::ostream& out, const std::vector<GainRow>& rows);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_cagent_csv(std::ostream& out, const std::vector<CagentRow>& rows);
void write_grid_csv(std::ostream& out, const std::vector<GridCell>& cells, const ExperimentSpec& spec);
/// Per-step trace: step,A,bit
void write_run_csv(std::ostream& out, const RunResult& result);

/// Run the experiment and return its CSV text.
std::string run_experiment(const ExperimentSpec& spec);

} // namespace thgame
