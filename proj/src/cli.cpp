#include "schoenberg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "schoenberg/ca.hpp"
#include "schoenberg/copper.hpp"
#include "schoenberg/diagnostics.hpp"
#include "schoenberg/estimator.hpp"
#include "schoenberg/io.hpp"

namespace schoenberg {

namespace {

using Index = Eigen::Index;

struct Common {
    std::string input;
    std::string format;
    std::string transform;
    std::string weights_col = "w";
    std::uint64_t seed = 1;
    double tol = 1e-12;
    int max_iter = 10000;
    bool multi_start = false;
    std::size_t random_starts = 0;
    bool no_aggregate = false;
    bool pretty = false;
    std::string output;

    // command specific
    std::string grid;
    std::string family;
    std::size_t dim = 2;
    bool fixture_square = false;
};

struct Numbers {
    bool pretty = false;
    std::string operator()(double v) const { return pretty ? io::format_pretty(v) : io::format_double(v); }
    std::string join(const Vector& v, char sep = ',') const {
        std::string s;
        for (Index i = 0; i < v.size(); ++i) {
            if (i) s += sep;
            s += (*this)(v(i));
        }
        return s;
    }
};

struct Dataset {
    std::string format;
    std::string sha256;
    DistanceMatrix d;
    Weights w;
    std::optional<Configuration> config;
    std::optional<ContingencyTable> table;
    std::size_t raw_size = 0;
    bool aggregated = false;
};

std::string copper_text() {
    std::string s = "label,x\n";
    for (double v : kCopper) s += fmt::format("{:.2f},{}\n", v, io::format_double(v));
    return s;
}

std::string table_text(const ContingencyTable& t) {
    std::string s = "row";
    for (const auto& c : t.col_labels()) s += "," + c;
    s += '\n';
    for (std::size_t i = 0; i < t.rows(); ++i) {
        s += t.row_labels()[i];
        for (std::size_t g = 0; g < t.cols(); ++g) s += "," + io::format_double(t.counts()(Index(i), Index(g)));
        s += '\n';
    }
    return s;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io::InputError(fmt::format("{}: cannot open file", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Configuration select_rows(const Configuration& c, const std::vector<std::vector<std::size_t>>& members,
                          const std::vector<std::string>& labels) {
    Configuration out;
    out.coords.resize(Index(members.size()), c.coords.cols());
    for (std::size_t k = 0; k < members.size(); ++k) out.coords.row(Index(k)) = c.coords.row(Index(members[k].front()));
    out.labels = labels;
    return out;
}

Dataset load(const Common& c, std::string default_format, bool aggregate) {
    std::string text;
    if (c.input == "@copper") {
        text = copper_text();
        default_format = "points";
    } else if (c.input == "@synthetic") {
        text = table_text(synthetic_dominant_table());
        default_format = "table";
    } else if (!c.input.empty() && c.input.front() == '@') {
        throw io::InputError(fmt::format("{}: unknown built-in dataset (use @copper or @synthetic)", c.input));
    } else {
        text = slurp(c.input);
    }
    const std::string format = c.format.empty() ? default_format : c.format;
    std::istringstream stream(text);
    const io::CsvRows rows = io::read_csv(stream, c.input);

    std::optional<DistanceMatrix> d;
    std::optional<Weights> w;
    std::optional<Configuration> config;
    std::optional<ContingencyTable> table;
    if (format == "points") {
        auto p = io::parse_points(rows, c.weights_col);
        d = sq_euclidean(p.config);
        w = p.weights;
        config = std::move(p.config);
    } else if (format == "dist") {
        auto p = io::parse_distances(rows);
        w = p.weights ? Weights::normalized(*p.weights) : Weights::uniform(p.distances.size());
        d = std::move(p.distances);
    } else if (format == "table") {
        table = io::parse_table(rows);
        d = chi_square_distances(*table);
        w = row_weights(*table);
        const std::size_t full = std::min(table->rows(), table->cols()) - 1;
        if (full >= 1) config = factorial_coordinates(*table, full);
    } else {
        throw io::InputError(fmt::format("unknown format '{}' (points, dist or table)", format));
    }

    Dataset out{format, io::sha256_hex(text), *d, *w, std::move(config), std::move(table), d->size()};
    out.aggregated = aggregate;
    if (aggregate) {
        if (format == "points") {
            auto agg = aggregate_ties(*out.config, out.w);
            out.d = agg.distances;
            out.w = agg.weights;
            out.config = agg.configuration;
        } else {
            auto agg = aggregate_ties(out.d, out.w);
            if (out.config) out.config = select_rows(*out.config, agg.members, agg.distances.labels());
            out.d = agg.distances;
            out.w = agg.weights;
        }
    }
    return out;
}

std::string manifest(const std::string& command, const Common& c, const Dataset* data, const std::string& transform,
                     const std::vector<std::pair<std::string, std::string>>& extra) {
    std::string s = fmt::format("# schoenberg {} command={}", kVersion, command);
    if (data)
        s += fmt::format(" input={} format={} sha256={} n={} aggregate={}", c.input, data->format, data->sha256,
                         data->raw_size, data->aggregated ? "on" : "off");
    if (!transform.empty()) s += " transform=" + transform;
    s += fmt::format(" tol={} max_iter={} multi_start={} random_starts={}", c.tol, c.max_iter, c.multi_start ? "on" : "off", c.random_starts);
    for (const auto& [k, v] : extra) s += fmt::format(" {}={}", k, v);
    s += fmt::format(" seed={}\n", c.seed);
    return s;
}

EstimateOptions estimate_options(const Common& c) {
    if (!(c.tol > 0.0)) throw io::InputError("--tol must be > 0");
    if (c.max_iter < 1) throw io::InputError("--max-iter must be >= 1");
    EstimateOptions o;
    o.tol_alpha = c.tol;
    o.max_iter = c.max_iter;
    o.stability_seed = c.seed;
    return o;
}

Transform parse_transform(const std::string& s) {
    try {
        return Transform::parse(s);
    } catch (const std::invalid_argument& e) {
        throw io::InputError(fmt::format("--transform '{}': {}", s, e.what()));
    }
}

std::string result_record(const EstimateResult& r, const Transform& t, const Dataset& data, const Numbers& num) {
    std::vector<std::pair<std::string, std::string>> f;
    f.emplace_back("transform", t.to_string());
    f.emplace_back("family", std::string(family_name(t.family())));
    f.emplace_back("n", std::to_string(data.d.size()));
    f.emplace_back("regime", std::string(regime_name(r.regime)));
    f.emplace_back("gamma", num(r.gamma));
    f.emplace_back("entropy", num(r.entropy));
    f.emplace_back("strain", r.strain ? num(*r.strain) : "NA");
    f.emplace_back("iterations", std::to_string(r.iterations));
    f.emplace_back("converged", r.converged ? "true" : "false");
    if (r.concentrated_at) f.emplace_back("concentrated_at", data.d.labels()[*r.concentrated_at]);
    if (r.stability) {
        f.emplace_back("stable", r.stability->stable ? "true" : "false");
        f.emplace_back("sufficient", num(r.stability->sufficient_lhs));
        f.emplace_back("directional_min", num(r.stability->directional_min));
    }
    if (data.config) f.emplace_back("centroid", num.join(data.config->coords.transpose() * r.alpha.values()));
    f.emplace_back("alpha", num.join(r.alpha.values()));
    std::string s;
    for (std::size_t k = 0; k < f.size(); ++k) s += fmt::format("{}{}={}", k ? "\t" : "", f[k].first, f[k].second);
    return s + '\n';
}

int cmd_estimate(const Common& c, std::string& body) {
    const Dataset data = load(c, "points", !c.no_aggregate);
    const Transform t = parse_transform(c.transform.empty() ? "identity" : c.transform);
    const EstimateOptions opts = estimate_options(c);
    const Numbers num{c.pretty};
    body = manifest("estimate", c, &data, t.to_string(), {});
    if (c.multi_start || c.random_starts > 0) {
        const auto found = multi_start(data.d, data.w, t, opts, default_starts(data.w, c.random_starts, c.seed));
        for (const auto& r : found) body += result_record(r, t, data, num);
        return found.front().converged ? exit_ok : exit_not_converged;
    }
    const EstimateResult r = estimate(data.d, data.w, t, opts);
    body += result_record(r, t, data, num);
    return r.converged ? exit_ok : exit_not_converged;
}

struct GridSpec {
    SweepParameter param;
    std::vector<double> values;
};

double grid_number(const std::string& s, const std::string& spec) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw io::InputError(fmt::format("--grid '{}': '{}' is not a number", spec, s));
    }
}

GridSpec parse_grid(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw io::InputError(fmt::format("--grid '{}': expected name=start:stop:step", spec));
    const std::string name = spec.substr(0, eq);
    std::vector<std::string> parts;
    std::stringstream ss(spec.substr(eq + 1));
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);

    GridSpec g;
    if (name == "q") g.param = SweepParameter::q;
    else if (name == "delta") g.param = SweepParameter::delta;
    else if (name == "lambda") g.param = SweepParameter::lambda;
    else throw io::InputError(fmt::format("--grid '{}': parameter must be q, delta or lambda", spec));

    try {
        if (!parts.empty() && parts.front() == "log") {
            if (parts.size() != 4) throw io::InputError(fmt::format("--grid '{}': expected log:start:stop:count", spec));
            const double count = grid_number(parts[3], spec);
            if (count != std::floor(count)) throw io::InputError(fmt::format("--grid '{}': count must be an integer", spec));
            g.values = log_grid(grid_number(parts[1], spec), grid_number(parts[2], spec), static_cast<int>(count));
        } else if (parts.size() == 1) {
            g.values = {grid_number(parts[0], spec)};
        } else if (parts.size() == 3) {
            g.values = linear_grid(grid_number(parts[0], spec), grid_number(parts[1], spec), grid_number(parts[2], spec));
        } else {
            throw io::InputError(fmt::format("--grid '{}': expected start:stop:step", spec));
        }
    } catch (const std::invalid_argument& e) {
        throw io::InputError(fmt::format("--grid '{}': {}", spec, e.what()));
    }
    if (g.values.empty()) throw io::InputError(fmt::format("--grid '{}': empty grid", spec));
    return g;
}

Family parse_family(const std::string& name, SweepParameter param) {
    if (name.empty()) return param == SweepParameter::q ? Family::power : Family::exponential;
    for (Family f : {Family::power, Family::exponential, Family::logarithmic, Family::tukey, Family::huber})
        if (family_name(f) == name) return f;
    throw io::InputError(fmt::format("--family '{}': expected power, exp, log, tukey or huber", name));
}

int cmd_sweep(const Common& c, std::string& body) {
    if (c.grid.empty()) throw io::InputError("sweep needs --grid");
    const GridSpec grid = parse_grid(c.grid);
    const Family family = parse_family(c.family, grid.param);
    try {
        (void)transform_at(family, grid.param, grid.values.front());
    } catch (const std::invalid_argument& e) {
        throw io::InputError(fmt::format("--grid '{}' with family {}: {}", c.grid, family_name(family), e.what()));
    }
    const Dataset data = load(c, "points", !c.no_aggregate);
    SweepOptions opts;
    opts.estimate = estimate_options(c);
    opts.multi_start = c.multi_start || c.random_starts > 0;
    opts.random_starts = c.random_starts;
    opts.seed = c.seed;
    const auto records = sweep(data.d, data.w, family, grid.param, grid.values, opts, data.config ? &*data.config : nullptr);

    const Numbers num{c.pretty};
    body = manifest("sweep", c, &data, "", {{"family", std::string(family_name(family))}, {"grid", c.grid}});
    body += "param\tgamma\tentropy\tstrain\tregime\titerations\tconverged";
    if (opts.multi_start) body += "\tminima";
    const std::size_t dims = data.config ? data.config->dim() : 0;
    for (std::size_t b = 0; b < dims; ++b) body += fmt::format("\tproj_{}", b + 1);
    body += "\terror\n";

    bool all_converged = true;
    for (const auto& r : records) {
        const bool failed = !r.error.empty();
        all_converged = all_converged && !failed && r.converged;
        body += num(r.param);
        if (failed) {
            body += "\tNA\tNA\tNA\tNA\tNA\tfalse";
            if (opts.multi_start) body += "\tNA";
            for (std::size_t b = 0; b < dims; ++b) body += "\tNA";
            std::string msg = r.error;
            std::replace(msg.begin(), msg.end(), '\t', ' ');
            body += "\t" + msg + "\n";
            continue;
        }
        body += fmt::format("\t{}\t{}\t{}\t{}\t{}\t{}", num(r.gamma), num(r.entropy), r.strain ? num(*r.strain) : "NA",
                            regime_name(r.regime), r.iterations, r.converged ? "true" : "false");
        if (opts.multi_start) body += fmt::format("\t{}", r.minima);
        for (std::size_t b = 0; b < dims; ++b) body += "\t" + num(r.projection(Index(b)));
        body += "\t-\n";
    }
    return all_converged ? exit_ok : exit_not_converged;
}

std::string coordinates_csv(const Configuration& config, const Weights& w, const Numbers& num) {
    std::string s = "label";
    for (std::size_t b = 0; b < config.dim(); ++b) s += fmt::format(",dim_{}", b + 1);
    s += ",w\n";
    for (std::size_t i = 0; i < config.size(); ++i) {
        s += config.labels[i];
        for (std::size_t b = 0; b < config.dim(); ++b) s += "," + num(config.coords(Index(i), Index(b)));
        s += "," + num(w[i]) + "\n";
    }
    return s;
}

std::size_t clip_dim(std::size_t requested, std::size_t limit) {
    if (requested < 1) throw io::InputError("--dim must be >= 1");
    if (limit < 1) throw io::InputError("need at least two distinct observations for coordinates");
    return std::min(requested, limit);
}

int cmd_mds(const Common& c, std::string& body) {
    const Dataset data = load(c, "dist", false);
    const Transform t = parse_transform(c.transform.empty() ? "identity" : c.transform);
    const DistanceMatrix d = apply_transform(data.d, t);
    const std::size_t dim = clip_dim(c.dim, d.size() - 1);
    Configuration config;
    try {
        config = classical_mds(d, data.w, dim);
    } catch (const std::domain_error& e) {
        throw io::InputError(fmt::format("{}: {}", c.input, e.what()));
    }
    const Numbers num{c.pretty};
    body = manifest("mds", c, &data, t.to_string(), {{"dim", std::to_string(dim)}});
    body += "# eigenvalues=" + num.join(config.eigenvalues) + "\n";
    body += "# explained_inertia=" + num.join(config.explained_inertia()) + "\n";
    body += coordinates_csv(config, data.w, num);
    return exit_ok;
}

int cmd_ca(const Common& c, std::string& body) {
    const Dataset data = load(c, "table", false);
    if (!data.table) throw io::InputError("ca needs a contingency table (--format table)");
    const ContingencyTable& table = *data.table;
    const std::size_t dim = clip_dim(c.dim, std::min(table.rows(), table.cols()) - 1);
    const Configuration config = factorial_coordinates(table, dim);
    const Numbers num{c.pretty};
    const double inertia = ca_inertia(table);

    std::optional<Transform> t;
    if (!c.transform.empty()) t = parse_transform(c.transform);
    body = manifest("ca", c, &data, t ? t->to_string() : "", {{"dim", std::to_string(dim)}});
    body += "# inertia=" + num(inertia) + "\n";
    body += "# chi2=" + num(inertia * table.total()) + "\n";
    body += "# eigenvalues=" + num.join(config.eigenvalues) + "\n";
    body += "# explained_inertia=" + num.join(config.explained_inertia()) + "\n";

    int code = exit_ok;
    if (t) {
        const EstimateResult r = estimate(data.d, data.w, *t, estimate_options(c));
        body += fmt::format("# estimate regime={} gamma={} entropy={} converged={} projection={}\n", regime_name(r.regime),
                            num(r.gamma), num(r.entropy), r.converged ? "true" : "false",
                            num.join(project_trajectory(r.alpha.values(), config)));
        if (!r.converged) code = exit_not_converged;
    }
    body += coordinates_csv(config, data.w, num);
    return code;
}

struct CheckRow {
    std::string check;
    std::string subject;
    bool passed;
    std::string detail;
};

std::vector<Transform> shipped_transforms() {
    return {Transform::identity(),        Transform::power(0.5),       Transform::power(0.1),
            Transform::exponential(1.0),  Transform::logarithmic(1.0), Transform::tukey(1.0),
            Transform::huber(1.0),        Transform::discrete(),
            Transform::mixture({{0.5, 1.0}, {0.5, 10.0}})};
}

CheckRow schoenberg_row(const std::string& subject, const SchoenbergReport& rep, const Numbers& num) {
    double worst = 0.0;
    std::string where = "-";
    for (const auto& cond : rep.conditions)
        if (!cond.passed && cond.worst_violation > worst) {
            worst = cond.worst_violation;
            where = fmt::format("order {} at D={}", cond.order, num(cond.worst_at));
        }
    return {"schoenberg", subject, rep.passed(), rep.passed() ? "sign pattern holds to order 4" : "violation " + where};
}

int cmd_check(Common c, std::string& body) {
    if (c.input.empty()) c.input = "@copper";
    const Dataset data = load(c, "points", false);
    const Numbers num{c.pretty};
    std::vector<CheckRow> rows;

    std::vector<double> grid = log_grid(1e-3, 1e2, 60);
    for (const auto& t : shipped_transforms())
        rows.push_back(schoenberg_row(t.to_string(), verify_schoenberg(t, grid, 4), num));
    if (c.fixture_square)
        rows.push_back(schoenberg_row("fixture:square", verify_schoenberg([](double d) { return d * d; }, grid, 4, 1.0, {}), num));

    const double scale = std::max(1.0, data.d.values().maxCoeff());
    std::optional<Configuration> config = data.config;
    if (!config && data.d.size() > 1)
        config = classical_mds(data.d, data.w, std::clamp<std::size_t>(euclidean_rank(data.d, data.w), 1, data.d.size() - 1));
    if (config) {
        const HuygensReport h = verify_huygens(*config, data.w);
        rows.push_back({"huygens", c.input, h.passed(1e-10 * scale),
                        fmt::format("weak {} strong {} centroid {}", num(h.weak_deviation), num(h.strong_deviation),
                                    num(h.centroid_deviation))});
    }
    for (const auto& t : shipped_transforms()) {
        const EuclideanCertificate cert = certify_euclidean(apply_transform(data.d, t), data.w);
        rows.push_back({"psd", t.to_string(), cert.passed,
                        fmt::format("min eigenvalue {} max {}", num(cert.min_eigenvalue), num(cert.max_eigenvalue))});
    }

    body = manifest("check", c, &data, "", {{"fixture_square", c.fixture_square ? "on" : "off"}});
    bool all = true;
    for (const auto& r : rows) {
        all = all && r.passed;
        body += fmt::format("{:<11}{:<36}{:<6}{}\n", r.check, r.subject, r.passed ? "PASS" : "FAIL", r.detail);
    }
    body += fmt::format("{} of {} checks passed\n", std::count_if(rows.begin(), rows.end(), [](const CheckRow& r) { return r.passed; }),
                        rows.size());
    return all ? exit_ok : exit_not_converged;
}

void add_common(CLI::App* sub, Common& c, bool input_required) {
    auto* in = sub->add_option("input", c.input, "CSV path, @copper or @synthetic");
    if (input_required) in->required();
    sub->add_option("--format", c.format, "input layout")->check(CLI::IsMember({"points", "dist", "table"}));
    sub->add_option("--transform", c.transform, "e.g. power:q=0.5, exp:lambda=0.1, huber:delta=1");
    sub->add_option("--weights-col", c.weights_col, "weight column of a points file")->capture_default_str();
    sub->add_option("--seed", c.seed, "seed for random starts and stability probes")->capture_default_str();
    sub->add_option("--tol", c.tol, "fixed-point tolerance on alpha")->capture_default_str();
    sub->add_option("--max-iter", c.max_iter, "iteration cap")->capture_default_str();
    sub->add_flag("--multi-start", c.multi_start, "solve from w and every observation, report distinct minima");
    sub->add_option("--random-starts", c.random_starts, "extra random starting profiles (implies --multi-start)");
    sub->add_flag("--no-aggregate", c.no_aggregate, "keep tied observations separate");
    sub->add_flag("--pretty", c.pretty, "six significant digits instead of full precision");
    sub->add_option("--output", c.output, "write results to this file");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Robust location from squared Euclidean distances via Schoenberg transformations", "schoenberg"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    Common c;

    auto* est = app.add_subcommand("estimate", "fixed-point location estimate");
    add_common(est, c, true);
    auto* sw = app.add_subcommand("sweep", "estimate along a parameter grid (TSV)");
    add_common(sw, c, true);
    sw->add_option("--grid", c.grid, "q=0.1:0.9:0.05 or delta=log:1e-3:1e4:50")->required();
    sw->add_option("--family", c.family, "power, exp, log, tukey or huber");
    auto* mds = app.add_subcommand("mds", "classical scaling of a distance matrix (CSV)");
    add_common(mds, c, true);
    mds->add_option("--dim", c.dim, "output dimensions")->capture_default_str();
    auto* ca = app.add_subcommand("ca", "correspondence analysis of a contingency table (CSV)");
    add_common(ca, c, true);
    ca->add_option("--dim", c.dim, "output dimensions")->capture_default_str();
    auto* check = app.add_subcommand("check", "identity and positivity self-checks");
    add_common(check, c, false);
    check->add_flag("--fixture-square", c.fixture_square, "also test phi(D) = D^2, which must fail");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_input_error;
    }

    std::string body;
    int code = exit_ok;
    try {
        if (est->parsed()) code = cmd_estimate(c, body);
        else if (sw->parsed()) code = cmd_sweep(c, body);
        else if (mds->parsed()) code = cmd_mds(c, body);
        else if (ca->parsed()) code = cmd_ca(c, body);
        else code = cmd_check(c, body);
    } catch (const io::InputError& e) {
        err << "error: " << e.what() << '\n';
        return exit_input_error;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return exit_input_error;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_input_error;
    }

    if (c.output.empty()) {
        out << body;
    } else {
        std::ofstream f(c.output, std::ios::binary);
        if (!(f << body)) {
            err << "error: cannot write " << c.output << '\n';
            return exit_input_error;
        }
    }
    return code;
}

}  // namespace schoenberg
