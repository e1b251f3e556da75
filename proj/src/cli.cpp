#include "bfgraph/cli.hpp"

#include "bfgraph/error.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace bfgraph::cli {
namespace {

constexpr const char* tool = "bfgraph";

const std::vector<std::string> commands{"simulate", "ode", "tc", "singularity", "experiment"};
const std::vector<std::string> experiment_kinds{"concentration", "susceptibility", "cycles", "c1-scaling",
                                                "c2-scaling",    "giant-growth",   "critical-giant"};

std::string env_name(const std::string& flag) {
    std::string s = "BFGRAPH_";
    for (char c : flag) s += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

/// Flag values as parsed; unset entries fall back to the config file, then defaults.
struct Raw {
    std::optional<std::string> config, rule, side, kernel, kind, out, format;
    std::optional<std::uint32_t> n, x_cutoff;
    std::optional<double> t, rel_tol, abs_tol, precision;
    std::optional<int> replicas, i_max, threads;
    std::optional<std::uint64_t> seed, L;
    std::vector<double> checkpoints, t_grid, epsilons;
    std::vector<std::uint32_t> n_grid;
    bool no_conservation = false, fit = false;
    CLI::Option *o_checkpoints = nullptr, *o_t_grid = nullptr, *o_eps = nullptr, *o_n_grid = nullptr,
                *o_no_cons = nullptr, *o_fit = nullptr;
};

template <class T>
void resolve(const std::optional<T>& flag, const json& file, const std::string& key, T& target) {
    if (flag) target = *flag;
    else if (file.contains(key)) target = file.at(key).get<T>();
}

template <class T>
void resolve(const CLI::Option* opt, const std::vector<T>& flag, const json& file, const std::string& key,
             std::vector<T>& target) {
    if (opt->count() > 0) target = flag;
    else if (file.contains(key)) {
        const json& v = file.at(key);
        target = v.is_array() ? v.get<std::vector<T>>() : std::vector<T>{v.get<T>()};
    }
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw UsageError(msg);
}

void validate(const RunConfig& c) {
    require(std::find(commands.begin(), commands.end(), c.command) != commands.end(), "unknown command");
    require(c.format == "csv" || c.format == "json", "--format must be csv or json");
    require(c.n >= 2, "--n must be >= 2");
    require(std::isfinite(c.t) && c.t >= 0.0, "--t must be finite and >= 0");
    require(c.replicas >= 2, "--replicas must be >= 2");
    require(c.i_max >= 2, "--i-max must be >= 2");
    require(c.rel_tol > 0.0 && c.abs_tol > 0.0, "tolerances must be positive");
    require(c.precision > 0.0, "--precision must be positive");
    require(c.threads >= 1, "--threads must be >= 1");
    require(c.x_cutoff >= 1 && c.L >= 1, "--x-cutoff and --L must be >= 1");
    require(c.side == "sub" || c.side == "super", "--side must be sub or super");
    require(std::find(experiment_kinds.begin(), experiment_kinds.end(), c.kind) != experiment_kinds.end(),
            "unknown experiment kind '" + c.kind + "'");
    for (double e : c.epsilons) require(e > 0.0 && std::isfinite(e), "--epsilon values must be positive");
    for (auto n : c.n_grid) require(n >= 2, "--n-grid values must be >= 2");
    require(std::is_sorted(c.checkpoints.begin(), c.checkpoints.end()), "--checkpoints must be sorted");
    try {
        (void)c.process_rule();
        (void)parse_kernel(c.kernel);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

void apply_command_defaults(RunConfig& c) {
    if (c.command == "experiment") {
        if (c.epsilons.empty()) {
            if (c.kind == "giant-growth") c.epsilons = {0.05, 0.1, 0.15, 0.2};
            else if (c.kind == "c1-scaling" || c.kind == "c2-scaling" || c.kind == "cycles") c.epsilons = {0.2};
        }
        if (c.n_grid.empty() && (c.kind == "c1-scaling" || c.kind == "c2-scaling" || c.kind == "critical-giant"))
            c.n_grid = {10000, 30000, 100000};
        if (c.checkpoints.empty() && (c.kind == "concentration" || c.kind == "susceptibility")) c.checkpoints = {c.t};
    } else if (c.command == "simulate") {
        c.checkpoints.push_back(c.t);
        std::sort(c.checkpoints.begin(), c.checkpoints.end());
        c.checkpoints.erase(std::unique(c.checkpoints.begin(), c.checkpoints.end()), c.checkpoints.end());
    }
}

OdeConfig ode_config(const RunConfig& c) {
    OdeConfig o;
    o.i_max = c.i_max;
    o.rel_tol = c.rel_tol;
    o.abs_tol = c.abs_tol;
    o.checkpoints = c.checkpoints;
    o.kernel = parse_kernel(c.kernel);
    o.assert_conservation = c.assert_conservation;
    return o;
}

IntegratorOptions integrator(const RunConfig& c) {
    IntegratorOptions o;
    o.rel_tol = c.rel_tol;
    o.abs_tol = c.abs_tol;
    return o;
}

json envelope(const RunConfig& c) { return json{{"format_version", format_version}, {"config", c.to_json()}}; }

json manifest_for(const RunConfig& c, const std::vector<ReplicaRecord>& runs) {
    json m{{"format_version", format_version}, {"tool", tool}, {"config", c.to_json()}};
    json r = json::array();
    for (const auto& rec : runs) r.push_back({{"n", rec.n}, {"replica", rec.replica}, {"seed", rec.seed}});
    m["runs"] = r;
    return m;
}

RunOutput run_simulate(const RunConfig& c) {
    const ProcessRule rule = c.process_rule();
    ProcessState state(c.n, rule, c.seed);
    StatsOptions so;
    so.x_cutoff = c.x_cutoff;
    so.restrict_L = c.L;
    std::vector<GraphStats> rows;
    for (double t : c.checkpoints) rows.push_back(state.run_until(t, so));
    std::ostringstream os;
    if (c.format == "json") {
        // newline-delimited: a header record, then one record per checkpoint
        os << envelope(c).dump() << '\n';
        for (const auto& r : rows) os << json(r).dump() << '\n';
    } else {
        write_csv_preamble(os, c.to_json());
        write_stats_csv(os, rows);
    }
    return {os.str(), manifest_for(c, {{c.n, 0, c.seed}})};
}

RunOutput run_ode(const RunConfig& c) {
    const auto profiles = integrate_profile(c.process_rule(), c.t, ode_config(c));
    std::ostringstream os;
    if (c.format == "json") {
        json j = envelope(c);
        j["profiles"] = profiles;
        os << j.dump(2) << '\n';
    } else {
        write_csv_preamble(os, c.to_json());
        write_profile_csv(os, profiles);
    }
    return {os.str(), manifest_for(c, {})};
}

RunOutput run_tc(const RunConfig& c) {
    const CriticalPoint cp = find_tc(c.process_rule(), c.precision, integrator(c));
    std::ostringstream os;
    if (c.format == "json") {
        json j = envelope(c);
        j.update(json(cp));
        os << j.dump(2) << '\n';
    } else {
        write_csv_preamble(os, c.to_json());
        os << "rule,t_c,bracket_width,x1_at_tc\n"
           << cp.rule.name() << ',' << format_double(cp.t_c) << ',' << format_double(cp.bracket_width) << ','
           << format_double(cp.x1_at_tc) << '\n';
    }
    return {os.str(), manifest_for(c, {})};
}

RunOutput run_singularity(const RunConfig& c) {
    const ProcessRule rule = c.process_rule();
    std::ostringstream os;
    json j = envelope(c);
    std::vector<SingularLocus> loci;
    if (!c.epsilons.empty()) {
        const Side side = parse_side(c.side);
        const double tc = find_tc(rule, 1e-12).t_c;
        json coeffs = json::array(), fits = json::array();
        for (double eps : c.epsilons) {
            const AsymptoticCoeffs co = asymptotic_coeffs(eps, side, rule, tc);
            loci.push_back(co.locus);
            coeffs.push_back(co);
            if (c.fit) {
                OdeConfig o = ode_config(c);
                o.checkpoints.clear();
                o.assert_conservation = side == Side::subcritical;
                const auto profile = integrate_profile(rule, co.t, o).back();
                fits.push_back(verify_against_profile(profile, co));
            }
        }
        j["t_c"] = tc;
        j["coefficients"] = coeffs;
        if (c.fit) j["fits"] = fits;
    } else {
        const std::vector<double> grid = c.t_grid.empty() ? std::vector<double>{c.t} : c.t_grid;
        const RhoCurve curve = rho_curve(grid, rule);
        loci = curve.loci;
        j["loci"] = curve.loci;
        j["rho_d1"] = curve.rho_d1;
        j["rho_d2"] = curve.rho_d2;
    }
    if (c.format == "json") {
        os << j.dump(2) << '\n';
    } else {
        write_csv_preamble(os, c.to_json());
        write_locus_csv(os, loci);
    }
    return {os.str(), manifest_for(c, {})};
}

RunOutput run_experiment(const RunConfig& c) {
    const ProcessRule rule = c.process_rule();
    std::ostringstream os;
    json j = envelope(c);
    std::vector<ReplicaRecord> runs;
    const bool csv = c.format == "csv";
    if (csv) write_csv_preamble(os, c.to_json());

    if (c.kind == "concentration" || c.kind == "susceptibility") {
        EnsembleConfig e;
        e.rule = rule;
        e.n_list = c.n_grid.empty() ? std::vector<std::uint32_t>{c.n} : c.n_grid;
        e.replicas = c.replicas;
        e.base_seed = c.seed;
        e.checkpoints = c.checkpoints;
        e.L = c.L;
        e.x_cutoff = c.x_cutoff;
        e.campaign = c.kind;
        e.threads = c.threads;
        const ConcentrationReport r =
            c.kind == "concentration" ? concentration_experiment(e) : susceptibility_concentration(e);
        runs = r.ensemble.records;
        if (csv) write_concentration_csv(os, r.rows);
        j["report"] = r;
    } else if (c.kind == "cycles") {
        const CycleReport r = cycle_census(rule, c.epsilons.front(), c.n, c.replicas, c.seed, c.threads);
        runs = r.ensemble.records;
        if (csv) {
            os << "unicyclic_count,runs\n";
            for (std::size_t k = 0; k < r.histogram.size(); ++k) os << k << ',' << r.histogram[k] << '\n';
        }
        j["report"] = r;
    } else if (c.kind == "c1-scaling" || c.kind == "c2-scaling") {
        ScalingConfig s;
        s.rule = rule;
        s.epsilons = c.epsilons;
        s.n_grid = c.n_grid;
        s.replicas = c.replicas;
        s.base_seed = c.seed;
        s.threads = c.threads;
        const ScalingReport r = c.kind == "c1-scaling" ? c1_scaling(s) : c2_scaling(s);
        for (const auto& e : r.ensembles) runs.insert(runs.end(), e.records.begin(), e.records.end());
        if (csv) write_scaling_csv(os, r.rows);
        j["report"] = r;
    } else if (c.kind == "giant-growth") {
        const GrowthReport r = giant_growth(rule, c.epsilons, c.n, c.replicas, c.seed, c.threads);
        runs = r.records;
        if (csv) write_growth_csv(os, r.rows);
        j["report"] = r;
    } else {
        const auto rows = critical_giant(rule, c.n_grid, c.replicas, c.seed, c.threads);
        runs = replica_records(c.seed, "critical-giant", c.n_grid, c.replicas);
        if (csv) {
            os << "n,mean_fraction,std_error\n";
            for (const auto& r : rows)
                os << r.n << ',' << format_double(r.mean_fraction) << ',' << format_double(r.std_error) << '\n';
        }
        j["report"] = {{"rows", rows}};
    }
    if (!csv) os << j.dump(2) << '\n';
    return {os.str(), manifest_for(c, runs)};
}

json error_record(int exit_code, const std::string& kind, const std::string& message) {
    return json{{"format_version", format_version}, {"tool", tool},          {"status", "error"},
                {"exit_code", exit_code},           {"kind", kind},          {"message", message}};
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorKind::io, "cannot open " + path + " for writing");
    f << body;
    if (!f) fail(ErrorKind::io, "failed writing " + path);
}

} // namespace

json RunConfig::to_json() const {
    json j{{"command", command}, {"rule", rule}};
    if (!decision_table.empty()) j["decision_table"] = decision_table;
    j.update(json{{"n", n},
                  {"t", t},
                  {"checkpoints", checkpoints},
                  {"t_grid", t_grid},
                  {"epsilon", epsilons},
                  {"side", side},
                  {"replicas", replicas},
                  {"seed", seed},
                  {"i_max", i_max},
                  {"rel_tol", rel_tol},
                  {"abs_tol", abs_tol},
                  {"precision", precision},
                  {"kernel", kernel},
                  {"assert_conservation", assert_conservation},
                  {"kind", kind},
                  {"n_grid", n_grid},
                  {"fit", fit},
                  {"x_cutoff", x_cutoff},
                  {"L", L},
                  {"out", out},
                  {"format", format},
                  {"threads", threads}});
    return j;
}

ProcessRule RunConfig::process_rule() const {
    ProcessRule r = ProcessRule::parse(rule);
    if (decision_table.empty()) return r;
    if (r.kind() != RuleKind::bounded_size) fail(ErrorKind::invalid_argument, "decision_table requires rule bounded:K");
    std::vector<Choice> table;
    for (int v : decision_table) {
        if (v != 0 && v != 1) fail(ErrorKind::invalid_argument, "decision_table entries must be 0 or 1");
        table.push_back(static_cast<Choice>(v));
    }
    return ProcessRule::bounded_size(r.cutoff(), std::move(table));
}

bool parse(int argc, const char* const* argv, RunConfig& config, std::ostream& out) {
    CLI::App app{"Bohman-Frieze and Achlioptas random graph processes: simulation, density ODEs, critical points, "
                 "singularity analysis and Monte Carlo experiments"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    Raw raw;
    const auto opt = [&](const std::string& flag, auto& target, const std::string& help) {
        return app.add_option("--" + flag, target, help)->envname(env_name(flag));
    };
    opt("config", raw.config, "JSON file with defaults for any option (keys use underscores)");
    opt("rule", raw.rule, "er | bf | bounded:K");
    opt("n", raw.n, "vertex count");
    opt("t", raw.t, "target time: simulate end, ode t_end, singularity time, experiment checkpoint");
    app.add_option("--t-end", raw.t, "alias of --t");
    raw.o_checkpoints = opt("checkpoints", raw.checkpoints, "additional sorted times")->delimiter(',');
    raw.o_t_grid = opt("t-grid", raw.t_grid, "singularity time grid")->delimiter(',');
    raw.o_eps = opt("epsilon", raw.epsilons, "distance from t_c; a list for sweeps")->delimiter(',');
    opt("side", raw.side, "sub | super");
    opt("replicas", raw.replicas, "replicas per configuration");
    opt("seed", raw.seed, "base seed");
    opt("i-max", raw.i_max, "density truncation order");
    opt("rel-tol", raw.rel_tol, "integrator relative tolerance");
    opt("abs-tol", raw.abs_tol, "integrator absolute tolerance");
    opt("precision", raw.precision, "t_c bracket width");
    opt("kernel", raw.kernel, "convolution kernel: reference | openmp | fft | auto");
    raw.o_no_cons = app.add_flag("--no-conservation", raw.no_conservation, "allow ode past t_c")
                        ->envname(env_name("no-conservation"));
    opt("kind", raw.kind, "experiment: concentration | susceptibility | cycles | c1-scaling | c2-scaling | "
                          "giant-growth | critical-giant");
    raw.o_n_grid = opt("n-grid", raw.n_grid, "vertex counts for sweeps")->delimiter(',');
    raw.o_fit = app.add_flag("--fit", raw.fit, "fit the ODE profile against the singularity prediction")
                    ->envname(env_name("fit"));
    opt("x-cutoff", raw.x_cutoff, "largest i reported for X_i/n");
    opt("L", raw.L, "restricted susceptibility cap");
    opt("out", raw.out, "output path, - for stdout");
    opt("format", raw.format, "csv | json");
    opt("threads", raw.threads, "OpenMP threads");
    for (const auto& c : commands) app.add_subcommand(c, "run the " + c + " command");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return false;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return false;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    json file = json::object();
    if (raw.config) {
        std::ifstream f(*raw.config);
        if (!f) throw UsageError("cannot read config file " + *raw.config);
        try {
            file = json::parse(f);
        } catch (const json::exception& e) {
            throw UsageError("config file is not valid JSON: " + std::string(e.what()));
        }
        if (!file.is_object()) throw UsageError("config file must hold a JSON object");
    }

    RunConfig c;
    c.command = app.get_subcommands().front()->get_name();
    try {
        resolve(raw.rule, file, "rule", c.rule);
        if (file.contains("decision_table")) c.decision_table = file.at("decision_table").get<std::vector<int>>();
        resolve(raw.n, file, "n", c.n);
        if (!raw.t && file.contains("t_end")) c.t = file.at("t_end").get<double>();
        resolve(raw.t, file, "t", c.t);
        resolve(raw.o_checkpoints, raw.checkpoints, file, "checkpoints", c.checkpoints);
        resolve(raw.o_t_grid, raw.t_grid, file, "t_grid", c.t_grid);
        resolve(raw.o_eps, raw.epsilons, file, "epsilon", c.epsilons);
        resolve(raw.side, file, "side", c.side);
        resolve(raw.replicas, file, "replicas", c.replicas);
        resolve(raw.seed, file, "seed", c.seed);
        resolve(raw.i_max, file, "i_max", c.i_max);
        resolve(raw.rel_tol, file, "rel_tol", c.rel_tol);
        resolve(raw.abs_tol, file, "abs_tol", c.abs_tol);
        resolve(raw.precision, file, "precision", c.precision);
        resolve(raw.kernel, file, "kernel", c.kernel);
        if (raw.o_no_cons->count() > 0) c.assert_conservation = !raw.no_conservation;
        else if (file.contains("assert_conservation")) c.assert_conservation = file.at("assert_conservation").get<bool>();
        resolve(raw.kind, file, "kind", c.kind);
        resolve(raw.o_n_grid, raw.n_grid, file, "n_grid", c.n_grid);
        if (raw.o_fit->count() > 0) c.fit = raw.fit;
        else if (file.contains("fit")) c.fit = file.at("fit").get<bool>();
        resolve(raw.x_cutoff, file, "x_cutoff", c.x_cutoff);
        resolve(raw.L, file, "L", c.L);
        resolve(raw.out, file, "out", c.out);
        resolve(raw.format, file, "format", c.format);
        c.threads = omp_get_num_procs();
        resolve(raw.threads, file, "threads", c.threads);
    } catch (const json::exception& e) {
        throw UsageError("bad value in config file: " + std::string(e.what()));
    }
    apply_command_defaults(c);
    validate(c);
    config = std::move(c);
    return true;
}

RunOutput execute(const RunConfig& c) {
    omp_set_num_threads(c.threads);
    if (c.command == "simulate") return run_simulate(c);
    if (c.command == "ode") return run_ode(c);
    if (c.command == "tc") return run_tc(c);
    if (c.command == "singularity") return run_singularity(c);
    return run_experiment(c);
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig config;
    try {
        if (!parse(argc, argv, config, out)) return 0;
    } catch (const UsageError& e) {
        err << error_record(2, "usage", e.what()).dump() << '\n';
        return 2;
    }
    try {
        RunOutput r = execute(config);
        if (config.out == "-") {
            out << r.body;
        } else {
            write_file(config.out, r.body);
            r.manifest["outputs"] = json::array({config.out});
            write_file(config.out + ".manifest.json", r.manifest.dump(2) + "\n");
        }
        return 0;
    } catch (const Error& e) {
        const bool usage = e.kind() == ErrorKind::invalid_argument || e.kind() == ErrorKind::unsupported_rule;
        const int code = usage ? 2 : 1;
        err << error_record(code, std::string(to_string(e.kind())), e.what()).dump() << '\n';
        return code;
    } catch (const std::exception& e) {
        err << error_record(1, "internal", e.what()).dump() << '\n';
        return 1;
    }
}

} // namespace bfgraph::cli
