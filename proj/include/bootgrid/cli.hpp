#pragma once

// Command-line front end. Kept header-only like the rest of the library so the
// tool and the tests drive the same `run` entry point.

#include <charconv>
#include <cmath>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "asymptotics.hpp"
#include "growth.hpp"
#include "inversion.hpp"
#include "lattice.hpp"
#include "montecarlo.hpp"
#include "rules.hpp"

namespace bootgrid::cli {

inline constexpr const char* kVersion = "0.3.0";

/// Thrown for user input that is syntactically acceptable to the parser but
/// semantically malformed (exit code 2).
class usage_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct RunManifest {
    std::string subcommand;
    std::map<std::string, std::string> params;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    std::string version = kVersion;
    std::string timestamp;
};

using Cell = std::variant<std::monostate, std::string, std::int64_t, double>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// Shortest round-trip decimal form; byte-stable for equal doubles.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

inline std::string format_cell(const Cell& c) {
    struct {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const { return format_double(d); }
    } visitor;
    return std::visit(visitor, c);
}

inline nlohmann::json cell_json(const Cell& c) {
    struct {
        nlohmann::json operator()(std::monostate) const { return nullptr; }
        nlohmann::json operator()(const std::string& s) const { return s; }
        nlohmann::json operator()(std::int64_t i) const { return i; }
        nlohmann::json operator()(double d) const { return std::isfinite(d) ? nlohmann::json(d) : nlohmann::json(format_double(d)); }
    } visitor;
    return std::visit(visitor, c);
}

inline nlohmann::json manifest_json(const RunManifest& m) {
    nlohmann::json j;
    j["subcommand"] = m.subcommand;
    j["version"] = m.version;
    j["timestamp"] = m.timestamp;
    j["threads"] = m.threads;
    j["seed"] = m.seed ? nlohmann::json(*m.seed) : nlohmann::json(nullptr);
    j["params"] = m.params;
    return j;
}

inline void write_manifest_comments(std::ostream& os, const RunManifest& m) {
    os << "# bootgrid " << m.version << '\n';
    os << "# subcommand: " << m.subcommand << '\n';
    os << "# timestamp: " << m.timestamp << '\n';
    os << "# threads: " << m.threads << '\n';
    if (m.seed) os << "# seed: " << *m.seed << '\n';
    for (const auto& [k, v] : m.params) os << "# param." << k << ": " << v << '\n';
}

inline void write_csv(std::ostream& os, const RunManifest& m, const Table& t) {
    write_manifest_comments(os, m);
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
        os << '\n';
    }
}

inline void write_json(std::ostream& os, const RunManifest& m, const Table& t) {
    nlohmann::json j;
    j["manifest"] = manifest_json(m);
    j["columns"] = t.columns;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json r = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = cell_json(row[i]);
        j["rows"].push_back(std::move(r));
    }
    os << j.dump(2) << '\n';
}

/// UTC ISO-8601; honours SOURCE_DATE_EPOCH for reproducible output files.
inline std::string current_timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline int default_threads() {
    if (const char* env = std::getenv("BOOTGRID_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

namespace detail {

inline std::vector<std::int64_t> parse_int_list(const std::string& s) {
    std::vector<std::int64_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc{} || ptr != item.data() + item.size() || item.empty())
            throw usage_error("malformed integer list '" + s + "'");
        out.push_back(v);
    }
    return out;
}

struct Common {
    std::string format = "csv";
    std::string out;
    int threads = 1;
    std::uint64_t seed = 0;
};

// Per-subcommand option storage. Lives for the whole run so CLI11 can bind
// to its members.
struct Options {
    Common common;
    std::string rule = "standard2";
    std::vector<std::int64_t> sides;
    std::vector<std::string> dims;
    std::string boundary = "open";
    std::vector<double> ps;
    std::vector<double> lnvs;
    std::int64_t trials = 1000;
    double target = 0.5;
    double tolerance = 1e-3;
    std::string input = "-";
    std::string method = "fast";
    std::vector<std::string> events;
    std::vector<int> sizes;
    std::string family = "12";
    std::optional<double> C, Cprime;
    double prefactor = 1.0;
};

inline std::vector<GridSpec> grids_from(const Options& o, int dimension) {
    const Boundary b = parse_boundary(o.boundary);
    std::vector<GridSpec> grids;
    for (const std::string& d : o.dims) {
        auto v = parse_int_list(d);
        if (static_cast<int>(v.size()) != dimension)
            throw usage_error("--dims " + d + " does not match rule dimension " + std::to_string(dimension));
        grids.emplace_back(v, b);
    }
    for (std::int64_t L : o.sides) grids.push_back(GridSpec::square(L, dimension, b));
    if (grids.empty()) throw usage_error("give a lattice size with --L or --dims");
    return grids;
}

inline RuleFamily family_from(const std::string& s) {
    try {
        return parse_family(s);
    } catch (const std::invalid_argument& e) {
        throw usage_error(e.what());
    } catch (const std::domain_error& e) {
        throw usage_error(e.what());
    }
}

inline Table table_fill(const Options& o) {
    const RuleFamily family = family_from(o.rule);
    const Rule rule = make_rule(family);
    if (o.ps.empty()) throw usage_error("fill needs --p");
    Table t{{"family", "dims", "p", "mean", "stderr", "trials", "seed"}, {}};
    for (const GridSpec& g : grids_from(o, rule.dimension())) {
        for (double p : o.ps) {
            const Estimate e = fill_probability(rule, g, p, o.trials, o.common.seed, o.common.threads);
            t.rows.push_back({family.name(), g.label(), p, e.mean, e.std_error, e.trials, static_cast<std::int64_t>(e.seed)});
        }
    }
    return t;
}

inline Table table_sweep(const Options& o) {
    const RuleFamily family = family_from(o.rule);
    if (o.ps.empty()) throw usage_error("sweep needs --p");
    const auto grids = grids_from(o, family.dimension());
    Table t{{"family", "dims", "p", "mean", "stderr", "trials", "seed"}, {}};
    for (const SweepRow& r : sweep(family, grids, o.ps, o.trials, o.common.seed, o.common.threads)) {
        t.rows.push_back({r.family.name(), r.grid.label(), r.p, r.fill.mean, r.fill.std_error, r.fill.trials,
                          static_cast<std::int64_t>(r.fill.seed)});
    }
    return t;
}

inline Table table_pc(const Options& o) {
    const RuleFamily family = family_from(o.rule);
    const Rule rule = make_rule(family);
    Table t{{"family", "dims", "target", "mean", "stderr", "trials", "seed"}, {}};
    for (const GridSpec& g : grids_from(o, rule.dimension())) {
        const Estimate e = estimate_pc(rule, g, {o.target, o.tolerance, o.trials, o.common.seed, o.common.threads});
        t.rows.push_back({family.name(), g.label(), o.target, e.mean, e.std_error, e.trials, static_cast<std::int64_t>(e.seed)});
    }
    return t;
}

inline GrowthDirection parse_event(const std::string& s) {
    if (s == "east_column") return GrowthDirection::east_column;
    if (s == "north_rows") return GrowthDirection::north_rows;
    throw usage_error("unknown growth event '" + s + "' (expected east_column|north_rows)");
}

inline Table table_growth(const Options& o) {
    if (o.ps.empty() || o.sizes.empty()) throw usage_error("growth needs --p and --size");
    std::vector<std::string> events = o.events.empty() ? std::vector<std::string>{"east_column"} : o.events;
    Table t{{"event", "param", "p", "exact", "mc_mean", "mc_stderr", "trials"}, {}};
    for (const std::string& name : events) {
        const GrowthDirection dir = parse_event(name);
        for (int size : o.sizes) {
            const GrowthEventSpec spec{dir, size};
            const int cap = dir == GrowthDirection::east_column ? 20 : 12;
            std::optional<GrowthPolynomial> poly;
            if (size <= cap) poly = growth_polynomial(spec, o.common.threads);
            for (double p : o.ps) {
                const Estimate e = estimate_growth_mc(spec, p, o.trials, o.common.seed, o.common.threads);
                t.rows.push_back({name, static_cast<std::int64_t>(size), p, poly ? Cell{(*poly)(p)} : Cell{}, e.mean,
                                  e.std_error, e.trials});
            }
        }
    }
    return t;
}

inline Table table_nucleation(const Options& o) {
    if (o.ps.empty()) throw usage_error("nucleation needs --p");
    Table t{{"p", "n0", "nf", "stages", "leading", "second", "total", "stage_sum"}, {}};
    for (double p : o.ps) {
        const StrategyRange r = strategy_range(p);
        const NucleationTerms c = nucleation_log_prob_closed(p);
        t.rows.push_back({p, r.n0, r.nf, r.stage_count(), c.leading, c.second, c.total(),
                          r.empty() ? Cell{} : Cell{nucleation_log_prob_sum(p)}});
    }
    return t;
}

inline ScalingModel model_from(const Options& o) {
    return ScalingModel::for_family(family_from(o.family), o.C, o.Cprime);
}

inline Table table_scaling(const Options& o) {
    if (o.lnvs.empty()) throw usage_error("scaling needs --lnv");
    const ScalingModel m = model_from(o);
    Table t{{"family", "lnv", "C", "leading_pc", "epsilon_window", "window_ratio"}, {}};
    for (double lnv : o.lnvs) {
        const double lead = leading_pc(m, lnv);
        Cell window, ratio;
        try {
            const double w = epsilon_window(m.family, lnv, o.prefactor);
            window = w;
            ratio = w / lead;
        } catch (const unsupported_error&) {
        }
        t.rows.push_back({m.family.name(), lnv, m.C, lead, window, ratio});
    }
    return t;
}

inline Table table_invert(const Options& o) {
    if (o.lnvs.empty()) throw usage_error("invert needs --lnv");
    const ScalingModel m = model_from(o);
    Table t{{"lnv", "p_numeric", "term1", "term2", "term3", "total", "residual"}, {}};
    for (double lnv : o.lnvs) {
        const double p = invert_numeric(lnv, m);
        const ExpansionTerms e = pc_expansion(lnv, m);
        t.rows.push_back({lnv, p, e.term1, e.term2, e.term3, e.total, expansion_residual(lnv, m)});
    }
    return t;
}

inline RunManifest manifest_for(const CLI::App& sub, const Common& common, bool randomized) {
    RunManifest m;
    m.subcommand = sub.get_name();
    m.threads = common.threads;
    m.timestamp = current_timestamp();
    if (randomized) m.seed = common.seed;
    for (const CLI::Option* opt : sub.get_options()) {
        const auto& names = opt->get_lnames();
        if (names.empty() || names.front() == "help" || names.front() == "threads" || names.front() == "seed") continue;
        std::string value;
        if (opt->count()) {
            for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
        } else {
            value = opt->get_default_str();
        }
        m.params[names.front()] = value;
    }
    return m;
}

}  // namespace detail

/// Runs one subcommand. Exit codes: 0 success, 1 runtime error, 2 usage error.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    using detail::Options;
    CLI::App app{"bootgrid: bootstrap percolation simulation and scaling"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    Options o;
    o.common.threads = default_threads();

    auto add_common = [&o](CLI::App* s, bool randomized) {
        s->add_option("--format", o.common.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
        s->add_option("--out", o.common.out, "output path (default stdout)");
        s->add_option("--threads", o.common.threads, "worker threads (default $BOOTGRID_THREADS or 1)")
            ->check(CLI::PositiveNumber);
        if (randomized) s->add_option("--seed", o.common.seed, "experiment seed")->capture_default_str();
    };
    auto add_lattice = [&o](CLI::App* s) {
        s->add_option("--rule,--family", o.rule, "standard2|standard3|modified2|12|1b:<b>|duarte|abc:<a>,<b>,<c>")
            ->capture_default_str();
        s->add_option("--L", o.sides, "side length list (comma separated)")->delimiter(',');
        s->add_option("--dims", o.dims, "explicit dims x,y[,z]; may repeat");
        s->add_option("--boundary", o.boundary, "open or periodic")->check(CLI::IsMember({"open", "periodic"}))->capture_default_str();
        s->add_option("--trials", o.trials, "trials (per probe for pc)")->check(CLI::PositiveNumber)->capture_default_str();
    };

    CLI::App* close = app.add_subcommand("close", "closure of a configuration file");
    close->add_option("--rule,--family", o.rule, "rule family")->capture_default_str();
    close->add_option("--in", o.input, "configuration text file ('-' for stdin)")->capture_default_str();
    close->add_option("--method", o.method, "fast|naive")->check(CLI::IsMember({"fast", "naive"}))->capture_default_str();
    add_common(close, false);

    CLI::App* fill = app.add_subcommand("fill", "Monte Carlo fill probability");
    add_lattice(fill);
    fill->add_option("--p", o.ps, "occupation probability list")->delimiter(',');
    add_common(fill, true);

    CLI::App* pc = app.add_subcommand("pc", "critical density where fill probability crosses the target");
    add_lattice(pc);
    pc->add_option("--target", o.target, "fill probability target")->capture_default_str();
    pc->add_option("--tol", o.tolerance, "bracket width in p")->capture_default_str();
    add_common(pc, true);

    CLI::App* sw = app.add_subcommand("sweep", "fill probability table over sizes and densities");
    add_lattice(sw);
    sw->add_option("--p", o.ps, "occupation probability list")->delimiter(',');
    add_common(sw, true);

    CLI::App* growth = app.add_subcommand("growth", "(1,2) rectangle growth probabilities");
    growth->add_option("--event", o.events, "east_column|north_rows; may repeat");
    growth->add_option("--size", o.sizes, "rectangle height n or width x list")->delimiter(',');
    growth->add_option("--p", o.ps, "occupation probability list")->delimiter(',');
    growth->add_option("--trials", o.trials, "Monte Carlo trials")->check(CLI::PositiveNumber)->capture_default_str();
    add_common(growth, true);

    CLI::App* nucl = app.add_subcommand("nucleation", "growth-strategy nucleation log-probability");
    nucl->add_option("--p", o.ps, "probability list")->delimiter(',');
    add_common(nucl, false);

    auto add_model = [&o](CLI::App* s) {
        s->add_option("--family", o.family, "scaling family tag")->capture_default_str();
        s->add_option("--C", o.C, "override leading constant C");
        s->add_option("--Cprime", o.Cprime, "override second constant C'");
        s->add_option("--lnv", o.lnvs, "ln V list")->delimiter(',');
    };
    CLI::App* scaling = app.add_subcommand("scaling", "leading-order thresholds and epsilon windows");
    add_model(scaling);
    scaling->add_option("--prefactor", o.prefactor, "epsilon-window prefactor (order of magnitude)")->capture_default_str();
    add_common(scaling, false);

    CLI::App* invert = app.add_subcommand("invert", "invert the critical volume and expand p_c(V)");
    add_model(invert);
    add_common(invert, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
            app.exit(e, out, err);
            return 0;
        }
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    CLI::App* chosen = app.get_subcommands().front();
    try {
        const bool randomized = chosen == fill || chosen == pc || chosen == sw || chosen == growth;
        const RunManifest manifest = detail::manifest_for(*chosen, o.common, randomized);

        std::ofstream file;
        if (!o.common.out.empty()) {
            file.open(o.common.out, std::ios::binary);
            if (!file) throw std::runtime_error("cannot open output file " + o.common.out);
        }
        std::ostream& sink = o.common.out.empty() ? out : file;

        if (chosen == close) {
            const Rule rule = make_rule(detail::family_from(o.rule));
            Configuration cfg = [&] {
                if (o.input == "-") return read_text(std::cin);
                std::ifstream in(o.input);
                if (!in) throw std::runtime_error("cannot open input file " + o.input);
                return read_text(in);
            }();
            const Configuration closed = o.method == "naive" ? closure_naive(cfg, rule) : closure_fast(cfg, rule);
            if (o.common.format == "json") {
                nlohmann::json j;
                j["manifest"] = manifest_json(manifest);
                j["occupied_before"] = cfg.count_occupied();
                j["occupied_after"] = closed.count_occupied();
                j["full"] = closed.is_full();
                j["configuration"] = to_text(closed);
                sink << j.dump(2) << '\n';
            } else {
                write_manifest_comments(sink, manifest);
                write_text(sink, closed);
            }
            return 0;
        }

        Table table;
        if (chosen == fill) table = detail::table_fill(o);
        else if (chosen == pc) table = detail::table_pc(o);
        else if (chosen == sw) table = detail::table_sweep(o);
        else if (chosen == growth) table = detail::table_growth(o);
        else if (chosen == nucl) table = detail::table_nucleation(o);
        else if (chosen == scaling) table = detail::table_scaling(o);
        else table = detail::table_invert(o);

        if (o.common.format == "json") write_json(sink, manifest, table);
        else write_csv(sink, manifest, table);
        return 0;
    } catch (const usage_error& e) {
        err << "error: " << e.what() << "\n\n" << chosen->help();
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace bootgrid::cli
