#include "thgame/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <CLI11.hpp>

#include "thgame/errors.hpp"
#include "thgame/experiment.hpp"

namespace thgame {

namespace {

int parse_int(std::string_view s, std::string_view whole)
{
    int v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size())
        throw ConfigError("invalid range '" + std::string(whole) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view text, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return parts;
}

struct Flags {
    std::string kind = "all";
    std::string m;
    std::string tau;
    std::string scale = "2..10";
    int N = 31;
    int S = 2;
    int runs = 50;
    long steps = 20000;
    long warmup = 400;
    std::uint64_t seed = 0;
    std::string out;
    std::string disorder_file;
    int n_c = 0;
    bool numeric = false;
    bool flip = false;
    std::string space = "reduced";
    unsigned workers = 0;
};

struct Command {
    const char* name;
    const char* help;
    Experiment experiment;
    Flags flags;
    CLI::App* app = nullptr;
};

void add_common(CLI::App* sub, Flags& f)
{
    sub->add_option("--kind", f.kind, "Game kinds: minority, majority, dollar, a comma list, or all")
        ->capture_default_str();
    sub->add_option("--m", f.m, "Memory range, e.g. 2..12 or 2,4,6")->capture_default_str();
    sub->add_option("--tau", f.tau, "Score window length(s)")->capture_default_str();
    sub->add_option("--N", f.N, "Number of agents (odd)")->capture_default_str();
    sub->add_option("--S", f.S, "Strategies per agent")->capture_default_str();
    sub->add_option("--runs", f.runs, "Independent runs per cell")->capture_default_str();
    sub->add_option("--steps", f.steps, "Measured steps per run (series length for persistence)")
        ->capture_default_str();
    sub->add_option("--warmup", f.warmup, "Unmeasured steps before measuring; default max(400, tau)");
    sub->add_option("--seed", f.seed, "Master seed")->capture_default_str();
    sub->add_option("--out", f.out, "Output CSV path (default: $THGAME_OUT_DIR/<command>.csv or stdout)");
    sub->add_option("--space", f.space, "Strategy space: reduced or full")->capture_default_str();
    sub->add_flag("--flip-bit", f.flip, "Winning bit is 1 when A < 0");
    sub->add_option("--workers", f.workers, "Worker threads (0 = hardware concurrency)");
}

std::filesystem::path output_path(const Command& c)
{
    if (!c.flags.out.empty())
        return c.flags.out;
    if (const char* dir = std::getenv("THGAME_OUT_DIR"); dir && *dir)
        return std::filesystem::path(dir) / (std::string(c.name) + ".csv");
    return {};
}

ExperimentSpec build_spec(const Command& c)
{
    const Flags& f = c.flags;
    ExperimentSpec spec;
    spec.experiment = c.experiment;
    spec.kinds = parse_kind_list(f.kind);
    spec.m_range = parse_int_list(f.m);
    spec.tau_set = parse_int_list(f.tau);
    if (c.experiment == Experiment::persistence_grid)
        spec.scale_range = parse_int_list(f.scale);
    spec.runs = f.runs;
    spec.master_seed = f.seed;
    spec.with_numeric = f.numeric;
    spec.workers = f.workers;
    if (!f.disorder_file.empty())
        spec.disorder_file = f.disorder_file;

    SimConfig& b = spec.base;
    b.N = f.N;
    b.S = f.S;
    b.m = spec.m_range.front();
    b.tau = spec.tau_set.front();
    b.steps = f.steps;
    b.seed = f.seed;
    b.n_counteradaptive = f.n_c;
    b.space = parse_space_kind(f.space);
    b.history_bit_flip = f.flip;
    const int max_tau = *std::max_element(spec.tau_set.begin(), spec.tau_set.end());
    b.warmup = c.app->count("--warmup") ? f.warmup : std::max<long>(400, max_tau);
    spec.output = output_path(c).string();
    return spec;
}

} // namespace

std::vector<int> parse_int_list(std::string_view text)
{
    std::vector<int> values;
    for (std::string_view item : split(text, ',')) {
        const std::size_t dots = item.find("..");
        if (dots == std::string_view::npos) {
            values.push_back(parse_int(item, text));
            continue;
        }
        const int lo = parse_int(item.substr(0, dots), text);
        const int hi = parse_int(item.substr(dots + 2), text);
        if (hi < lo)
            throw ConfigError("invalid range '" + std::string(text) + "': upper bound below lower bound");
        for (int v = lo; v <= hi; ++v)
            values.push_back(v);
    }
    return values;
}

std::vector<GameKind> parse_kind_list(std::string_view text)
{
    if (text == "all")
        return {std::begin(kAllGameKinds), std::end(kAllGameKinds)};
    std::vector<GameKind> kinds;
    for (std::string_view item : split(text, ','))
        kinds.push_back(parse_game_kind(item));
    return kinds;
}

int cli_dispatch(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Time-horizon minority, majority and dollar game simulator with exact Markov-chain gains."};
    app.name("thgame");
    app.require_subcommand(1);

    Command commands[] = {
        {"table1",
         "Numeric vs analytic agent and strategy gains of all three games on one quenched disorder; "
         "defaults m=2, S=2, tau=1, N=31. The numeric side averages --runs restarts of --steps "
         "measured steps from uniform initial histories (500 x 400 = 2e5 steps).",
         Experiment::table1, {}},
        {"sweep",
         "Illusion-of-control sweep: ensemble mean agent and strategy gains against memory m. "
         "Use --tau 1 for the short-window curves and --tau 1000 to expose the m~4 phase transition.",
         Experiment::illusion_sweep, {}},
        {"cagents",
         "Counteradaptive agents: mean per-step gain of c-agents minus s-agents against m "
         "(defaults: 3 of 31 c-agents, tau=400, 200 runs, 100 measured steps).",
         Experiment::counteradaptive, {}},
        {"persistence",
         "Persistence of the winning-bit series over an (m, scale) grid for each game "
         "(defaults: tau=100, 100 runs, series length 1000, m and scale 2..10).",
         Experiment::persistence_grid, {}},
        {"analytic",
         "Exact steady-state agent and strategy gains of seeded disorders; --numeric adds "
         "simulation rows (restart ensembles, as in table1) in the same schema.",
         Experiment::analytic_vs_numeric, {}},
    };

    Flags& t1 = commands[0].flags;
    t1.m = "2";
    t1.tau = "1";
    t1.steps = 400;
    t1.runs = 500;
    Flags& sw = commands[1].flags;
    sw.m = "2..12";
    sw.tau = "1";
    Flags& ca = commands[2].flags;
    ca.m = "2..14";
    ca.tau = "400";
    ca.runs = 200;
    ca.steps = 100;
    ca.n_c = 3;
    Flags& pe = commands[3].flags;
    pe.m = "2..10";
    pe.tau = "100";
    pe.runs = 100;
    pe.steps = 1000;
    Flags& an = commands[4].flags;
    an.m = "2";
    an.tau = "1";
    an.runs = 500;
    an.steps = 400;

    for (Command& c : commands) {
        c.app = app.add_subcommand(c.name, c.help);
        add_common(c.app, c.flags);
    }
    commands[0].app->add_option("--disorder-file", t1.disorder_file, "Disorder tensor file (omega format)");
    commands[2].app->add_option("--n-c-agents", ca.n_c, "Number of counteradaptive agents")->capture_default_str();
    commands[3].app->add_option("--scale-range,--scale", pe.scale, "Persistence scales")->capture_default_str();
    commands[4].app->add_option("--disorder-file", an.disorder_file, "Disorder tensor file (omega format)");
    commands[4].app->add_flag("--numeric", an.numeric, "Also simulate each disorder");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        for (Command& c : commands) {
            if (!c.app->parsed())
                continue;
            const ExperimentSpec spec = build_spec(c);
            std::ofstream file;
            if (!spec.output.empty()) {
                file.open(spec.output);
                if (!file)
                    throw ConfigError("cannot write output file '" + spec.output + "'");
            }
            const std::string csv = run_experiment(spec);
            std::ostream& sink = spec.output.empty() ? out : file;
            sink << csv;
            sink.flush();
            if (!sink)
                throw std::runtime_error("write failed");
        }
    } catch (const ConfigError& e) {
        err << "thgame: error: " << e.what() << '\n';
        return 2;
    } catch (const FormatError& e) {
        err << "thgame: error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "thgame: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace thgame
