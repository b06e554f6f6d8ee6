#include "gammasum/cli.hpp"

#include "gammasum/errors.hpp"
#include "gammasum/oracle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>

namespace gammasum::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

double parse_number(const std::string& text, const std::string& flag) {
    const std::string t = trim(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (t.empty() || used != t.size() || !std::isfinite(v))
        throw UsageError(flag + ": cannot parse number '" + text + "'");
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

std::string command_name(Command c) {
    switch (c) {
        case Command::pdf: return "pdf";
        case Command::cdf: return "cdf";
        case Command::quantile: return "quantile";
        case Command::outage_table: return "outage-table";
        case Command::validate: return "validate";
        case Command::moments: return "moments";
    }
    return "?";
}

std::string method_name(EvalPath p) {
    switch (p) {
        case EvalPath::automatic: return "auto";
        case EvalPath::series: return "series";
        case EvalPath::inversion: return "inversion";
    }
    return "?";
}

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Raw flag values collected by CLI11 before semantic validation.
struct RawFlags {
    std::string alpha, betas, rho, rho_file, m, snr_db, snr, y, y_range, p, th_db, th;
    std::string format = "json", output = "-", method = "auto";
    double tol = 1e-12;
    int order = 20;
    std::size_t samples = 1'000'000;
    std::uint64_t seed = 1;
    double delta = 1e-6;
    std::size_t ks_grid = 2000;
    double sample_scale = 1.0;
};

CorrelationMatrix make_rho(const RawFlags& raw, std::size_t n) {
    if (!raw.rho.empty() && !raw.rho_file.empty()) throw UsageError("--rho and --rho-file are mutually exclusive");
    try {
        if (!raw.rho.empty()) {
            CorrelationMatrix rho(parse_inline_matrix(raw.rho, "--rho"));
            if (rho.size() != n)
                throw UsageError("--rho: matrix is " + std::to_string(rho.size()) + "x" +
                                 std::to_string(rho.size()) + " but there are " + std::to_string(n) + " branches");
            return rho;
        }
        if (!raw.rho_file.empty()) {
            CorrelationMatrix rho = load_correlation_csv(raw.rho_file);
            if (rho.size() != n)
                throw UsageError("--rho-file: matrix is " + std::to_string(rho.size()) + "x" +
                                 std::to_string(rho.size()) + " but there are " + std::to_string(n) +
                                 " branches");
            return rho;
        }
    } catch (const UsageError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string(raw.rho.empty() ? "--rho-file: " : "--rho: ") + e.what());
    }
    return CorrelationMatrix::identity(n);
}

void build_params(const RawFlags& raw, RunSpec& spec) {
    const bool nakagami = !raw.m.empty();
    if (nakagami) {
        if (!raw.alpha.empty() || !raw.betas.empty())
            throw UsageError("--m (Nakagami mode) cannot be combined with --alpha/--betas");
        if (raw.snr_db.empty() == raw.snr.empty())
            throw UsageError("--m needs exactly one of --snr-db or --snr");
        const double m = parse_number(raw.m, "--m");
        if (!(m >= 0.5)) throw UsageError("--m: Nakagami m must be >= 0.5");
        std::vector<double> gammas;
        if (!raw.snr_db.empty()) {
            spec.snr_db = parse_list(raw.snr_db, "--snr-db");
            for (double db : spec.snr_db) gammas.push_back(db_to_linear(db));
        } else {
            gammas = parse_list(raw.snr, "--snr");
            for (double g : gammas)
                if (!(g > 0.0)) throw UsageError("--snr: average SNRs must be positive");
        }
        NakagamiMrcConfig cfg{m, gammas, make_rho(raw, gammas.size())};
        spec.params = cfg.to_params();
        spec.nakagami = std::move(cfg);
    } else {
        if (raw.alpha.empty()) throw UsageError("--alpha is required (or use --m for Nakagami mode)");
        if (raw.betas.empty()) throw UsageError("--betas is required (or use --m for Nakagami mode)");
        const double alpha = parse_number(raw.alpha, "--alpha");
        if (!(alpha > 0.0)) throw UsageError("--alpha: shape must be positive");
        std::vector<double> betas = parse_list(raw.betas, "--betas");
        for (double b : betas)
            if (!(b > 0.0)) throw UsageError("--betas: scales must be positive");
        if (betas.size() > kMaxBranches)
            throw UsageError("--betas: at most " + std::to_string(kMaxBranches) + " branches supported");
        const std::size_t n = betas.size();
        spec.params = GammaSumParams{alpha, ScaleVector(std::move(betas)), make_rho(raw, n)};
    }
    try {
        (void)spectrum_of(*spec.params);
    } catch (const std::exception& e) {
        throw UsageError(std::string(raw.rho_file.empty() ? "--rho: " : "--rho-file: ") + e.what());
    }
}

void build_grid(const RawFlags& raw, RunSpec& spec) {
    switch (spec.command) {
        case Command::pdf:
        case Command::cdf:
            if (raw.y.empty() == raw.y_range.empty()) throw UsageError("give exactly one of --y or --y-range");
            spec.grid.points = raw.y.empty() ? parse_sweep(raw.y_range, "--y-range") : parse_list(raw.y, "--y");
            break;
        case Command::quantile:
            if (raw.p.empty()) throw UsageError("--p is required for quantile");
            spec.grid.points = parse_list(raw.p, "--p");
            for (double p : spec.grid.points)
                if (!(p > 0.0 && p < 1.0)) throw UsageError("--p: probabilities must lie in (0, 1)");
            break;
        case Command::outage_table:
            if (raw.th_db.empty() == raw.th.empty()) throw UsageError("give exactly one of --th-db or --th");
            if (!raw.th_db.empty()) {
                spec.grid.points = parse_sweep(raw.th_db, "--th-db");
                spec.grid.in_db = true;
            } else {
                spec.grid.points = parse_list(raw.th, "--th");
                for (double t : spec.grid.points)
                    if (!(t > 0.0)) throw UsageError("--th: thresholds must be positive");
            }
            break;
        case Command::validate:
        case Command::moments:
            break;
    }
}

ordered_json params_json(const RunSpec& spec) {
    const GammaSumParams& p = *spec.params;
    ordered_json j;
    j["alpha"] = p.alpha;
    j["betas"] = std::vector<double>(p.betas.values().begin(), p.betas.values().end());
    ordered_json rho = ordered_json::array();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto row = p.rho.matrix().row(i);
        rho.push_back(std::vector<double>(row.begin(), row.end()));
    }
    j["rho"] = rho;
    if (spec.nakagami) {
        j["m"] = spec.nakagami->m;
        if (!spec.snr_db.empty()) j["snr_db"] = spec.snr_db;
        j["snr"] = spec.nakagami->gammas;
    }
    return j;
}

struct Row {
    ordered_json x;  // number, or a name for moments
    double value;
    double abs_err;
    std::string method;
    std::string warning;
};

void emit_rows(const RunSpec& spec, const std::vector<Row>& rows, std::ostream& out) {
    if (spec.format == OutputFormat::csv) {
        out << "x,value,abs_err,method\n";
        for (const auto& r : rows) {
            out << (r.x.is_number() ? format_number(r.x.get<double>()) : r.x.get<std::string>()) << ','
                << format_number(r.value) << ',' << format_number(r.abs_err) << ',' << r.method << '\n';
        }
        return;
    }
    ordered_json doc;
    doc["command"] = command_name(spec.command);
    doc["params"] = params_json(spec);
    doc["method"] = method_name(spec.method);
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json row;
        row["x"] = r.x;
        row["value"] = r.value;
        row["abs_err"] = r.abs_err;
        row["method"] = r.method;
        if (!r.warning.empty()) row["warning"] = r.warning;
        arr.push_back(std::move(row));
    }
    doc["rows"] = std::move(arr);
    out << doc.dump(2) << '\n';
}

EvalOptions eval_options(const RunSpec& spec) {
    EvalOptions opts;
    opts.path = spec.method;
    opts.target_abs_err = spec.tol;
    opts.inversion.method_order = spec.inversion_order;
    opts.inversion.target_rel_err = spec.tol;
    return opts;
}

// Evaluates rows concurrently; emitted order is grid order. The first
// failing point (in grid order) is reported.
template <class F>
std::vector<Row> evaluate_rows(std::size_t n, F&& eval, std::size_t& failed_index, std::string& failure) {
    std::vector<Row> rows(n);
    std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        try {
            rows[i] = eval(static_cast<std::size_t>(i));
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i]) continue;
        failed_index = i;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            failure = e.what();
        }
        return {};
    }
    failed_index = n;
    return rows;
}

int run_validate(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    const GammaSumParams& params = *spec.params;
    const GammaSumDistribution d(params);
    std::vector<double> sample_betas(params.betas.values().begin(), params.betas.values().end());
    for (double& b : sample_betas) b *= spec.sample_scale;
    const GammaSumParams sampled{params.alpha, ScaleVector(sample_betas), params.rho};

    const oracle::SampleBatch batch = oracle::sample(sampled, spec.samples, spec.seed);
    double ks = 0.0;
    try {
        ks = oracle::ks_distance(batch, d, spec.ks_grid);
    } catch (const std::exception& e) {
        err << "numerical failure while computing the KS distance: " << e.what() << '\n';
        return kExitNumerical;
    }
    const double bound = oracle::dkw_bound(spec.samples, spec.delta);
    bool pass = ks < bound;

    const double nd = static_cast<double>(spec.samples);
    ordered_json checks = ordered_json::array();
    std::vector<Row> rows;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double expected = params.alpha * params.betas[i];
        const double band = 5.0 * expected / std::sqrt(nd * params.alpha);
        const double diff = std::abs(batch.branch_means[i] - expected);
        const bool ok = diff <= band;
        pass = pass && ok;
        ordered_json c;
        c["branch"] = i + 1;
        c["sample_mean"] = batch.branch_means[i];
        c["expected"] = expected;
        c["band"] = band;
        c["pass"] = ok;
        checks.push_back(c);
        rows.push_back({static_cast<double>(i + 1), batch.branch_means[i], diff, "monte-carlo", {}});
    }

    if (spec.format == OutputFormat::csv) {
        out << "key,value\n";
        out << "seed," << spec.seed << "\nsamples," << spec.samples << "\nks_distance," << format_number(ks)
            << "\ndkw_bound," << format_number(bound) << "\ndelta," << format_number(spec.delta) << '\n';
        for (std::size_t i = 0; i < params.size(); ++i)
            out << "mean_branch_" << i + 1 << ',' << format_number(batch.branch_means[i]) << '\n';
        out << "pass," << (pass ? "true" : "false") << '\n';
    } else {
        ordered_json doc;
        doc["command"] = "validate";
        doc["params"] = params_json(spec);
        doc["method"] = "monte-carlo";
        doc["seed"] = spec.seed;
        doc["samples"] = spec.samples;
        doc["sample_scale"] = spec.sample_scale;
        doc["ks_distance"] = ks;
        doc["dkw_bound"] = bound;
        doc["delta"] = spec.delta;
        doc["branch_checks"] = checks;
        doc["pass"] = pass;
        ordered_json arr = ordered_json::array();
        for (const auto& r : rows) arr.push_back({{"x", r.x}, {"value", r.value}, {"abs_err", r.abs_err}});
        doc["rows"] = arr;
        out << doc.dump(2) << '\n';
    }
    return pass ? kExitOk : kExitValidation;
}

}  // namespace

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
    if (trim(text).empty()) throw UsageError(flag + ": empty list");
    std::vector<double> values;
    for (const auto& part : split(text, ',')) values.push_back(parse_number(part, flag));
    return values;
}

std::vector<double> parse_sweep(const std::string& text, const std::string& flag) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError(flag + ": expected start:stop:count, got '" + text + "'");
    const double start = parse_number(parts[0], flag);
    const double stop = parse_number(parts[1], flag);
    const double count_d = parse_number(parts[2], flag);
    if (!(count_d >= 1.0) || count_d != std::floor(count_d) || count_d > 1e7)
        throw UsageError(flag + ": count must be a positive integer");
    const auto count = static_cast<std::size_t>(count_d);
    if (count > 1 && !(start < stop)) throw UsageError(flag + ": start must be below stop");
    std::vector<double> points(count);
    for (std::size_t i = 0; i < count; ++i)
        points[i] = count == 1 ? start
                               : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    if (count > 1) points.back() = stop;
    return points;
}

SquareMatrix parse_inline_matrix(const std::string& text, const std::string& flag) {
    const auto rows = split(text, ';');
    const std::size_t n = rows.size();
    if (n == 0) throw UsageError(flag + ": empty matrix");
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto cells = split(rows[i], ',');
        if (cells.size() != n)
            throw UsageError(flag + ": row " + std::to_string(i + 1) + " has " + std::to_string(cells.size()) +
                             " entries, expected " + std::to_string(n));
        for (std::size_t j = 0; j < n; ++j) m(i, j) = parse_number(cells[j], flag);
    }
    return m;
}

RunSpec parse_args(const std::vector<std::string>& args) {
    CLI::App app{"Distribution of a sum of correlated gamma variables (MRC over Nakagami-m fading)", "gammasum"};
    app.require_subcommand(1);
    RawFlags raw;

    const auto add_common = [&raw](CLI::App* sub) {
        sub->add_option("--alpha", raw.alpha, "Common gamma shape alpha");
        sub->add_option("--betas", raw.betas, "Comma-separated gamma scales beta_1..beta_N");
        sub->add_option("--rho", raw.rho, "Inline correlation matrix, rows ';' entries ',' (default: identity)");
        sub->add_option("--rho-file", raw.rho_file, "Correlation matrix CSV file");
        sub->add_option("--m", raw.m, "Nakagami m (switches to Nakagami mode: alpha=m, beta=snr/m)");
        sub->add_option("--snr-db", raw.snr_db, "Comma-separated average branch SNRs in dB (Nakagami mode)");
        sub->add_option("--snr", raw.snr, "Comma-separated average branch SNRs, linear (Nakagami mode)");
        sub->add_option("--format", raw.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--output,-o", raw.output, "Output path, '-' for standard output");
        sub->add_option("--method", raw.method, "Evaluation path")
            ->check(CLI::IsMember({"auto", "series", "inversion"}));
        sub->add_option("--tol", raw.tol, "Absolute accuracy target");
        sub->add_option("--order", raw.order, "Talbot inversion node count (10..200)");
    };

    std::map<CLI::App*, Command> commands;
    const auto add = [&](const char* name, const char* help, Command c) {
        CLI::App* sub = app.add_subcommand(name, help);
        add_common(sub);
        commands[sub] = c;
        return sub;
    };
    CLI::App* pdf = add("pdf", "Evaluate the density", Command::pdf);
    CLI::App* cdf = add("cdf", "Evaluate the distribution function", Command::cdf);
    for (CLI::App* sub : {pdf, cdf}) {
        sub->add_option("--y", raw.y, "Comma-separated evaluation points");
        sub->add_option("--y-range", raw.y_range, "Linear sweep start:stop:count");
    }
    add("quantile", "Invert the distribution function", Command::quantile)
        ->add_option("--p", raw.p, "Comma-separated probabilities in (0,1)");
    CLI::App* outage = add("outage-table", "Outage probability versus threshold", Command::outage_table);
    outage->add_option("--th-db", raw.th_db, "Threshold sweep in dB, start:stop:count");
    outage->add_option("--th", raw.th, "Comma-separated linear thresholds");
    CLI::App* validate = add("validate", "Monte Carlo check of the analytic distribution", Command::validate);
    validate->add_option("--samples", raw.samples, "Number of Monte Carlo draws");
    validate->add_option("--seed", raw.seed, "RNG seed");
    validate->add_option("--delta", raw.delta, "DKW confidence parameter");
    validate->add_option("--grid-size", raw.ks_grid, "Order statistics at which the cdf is evaluated (0 = all)");
    validate->add_option("--sample-scale", raw.sample_scale, "Scale the sampled betas (negative control)");
    add("moments", "Mean and variance", Command::moments);

    std::vector<const char*> argv{"gammasum"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::CallForAllHelp&) {
        throw HelpRequested(app.help("", CLI::AppFormatMode::All));
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    RunSpec spec;
    for (const auto& [sub, command] : commands)
        if (sub->parsed()) spec.command = command;
    spec.format = raw.format == "csv" ? OutputFormat::csv : OutputFormat::json;
    spec.output = raw.output;
    spec.method = raw.method == "series" ? EvalPath::series
                  : raw.method == "inversion" ? EvalPath::inversion
                                              : EvalPath::automatic;
    if (!(raw.tol > 0.0)) throw UsageError("--tol: must be positive");
    spec.tol = raw.tol;
    if (raw.order < 10 || raw.order > 200) throw UsageError("--order: must lie in [10, 200]");
    spec.inversion_order = raw.order;
    if (raw.samples == 0) throw UsageError("--samples: must be at least 1");
    spec.samples = raw.samples;
    spec.seed = raw.seed;
    if (!(raw.delta > 0.0 && raw.delta < 1.0)) throw UsageError("--delta: must lie in (0, 1)");
    spec.delta = raw.delta;
    spec.ks_grid = raw.ks_grid;
    if (!(raw.sample_scale > 0.0)) throw UsageError("--sample-scale: must be positive");
    spec.sample_scale = raw.sample_scale;

    build_params(raw, spec);
    build_grid(raw, spec);
    if (spec.command == Command::validate) {
        const double twice_alpha = 2.0 * spec.params->alpha;
        if (std::abs(twice_alpha - std::round(twice_alpha)) > 1e-12)
            throw UsageError("--alpha: validate needs 2*alpha to be an integer (the Monte Carlo sampler is exact "
                             "only then); use pdf/cdf with --method series and --method inversion to cross-check "
                             "other shapes");
    }
    return spec;
}

int run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    std::ofstream file;
    std::ostream* sink = &out;
    if (spec.output != "-") {
        file.open(spec.output);
        if (!file) {
            err << "--output: cannot open '" << spec.output << "'\n";
            return kExitUsage;
        }
        sink = &file;
    }

    if (spec.command == Command::validate) return run_validate(spec, *sink, err);

    const GammaSumDistribution d(*spec.params);
    const EvalOptions opts = eval_options(spec);
    const auto& pts = spec.grid.points;
    std::size_t failed = 0;
    std::string failure;
    std::vector<Row> rows;

    switch (spec.command) {
        case Command::pdf:
        case Command::cdf: {
            const bool is_cdf = spec.command == Command::cdf;
            rows = evaluate_rows(
                pts.size(),
                [&](std::size_t i) {
                    const EvalResult r = is_cdf ? d.cdf(pts[i], opts) : d.pdf(pts[i], opts);
                    return Row{pts[i], r.value, r.abs_error_estimate, std::string(to_string(r.method)), r.warning};
                },
                failed, failure);
            if (failed < pts.size()) {
                err << "numerical failure at y=" << format_number(pts[failed]) << ": " << failure << '\n';
                return kExitNumerical;
            }
            break;
        }
        case Command::outage_table: {
            rows = evaluate_rows(
                pts.size(),
                [&](std::size_t i) {
                    const double th = spec.grid.in_db ? db_to_linear(pts[i]) : pts[i];
                    const EvalResult r = d.cdf(th, opts);
                    return Row{pts[i], r.value, r.abs_error_estimate, std::string(to_string(r.method)), r.warning};
                },
                failed, failure);
            if (failed < pts.size()) {
                err << "numerical failure at threshold " << format_number(pts[failed])
                    << (spec.grid.in_db ? " dB" : "") << ": " << failure << '\n';
                return kExitNumerical;
            }
            break;
        }
        case Command::quantile: {
            rows = evaluate_rows(
                pts.size(),
                [&](std::size_t i) {
                    const double y = d.quantile(pts[i], spec.tol, opts);
                    const EvalResult r = d.cdf(y, opts);
                    return Row{pts[i], y, std::abs(r.value - pts[i]), std::string(to_string(r.method)), r.warning};
                },
                failed, failure);
            if (failed < pts.size()) {
                err << "numerical failure at p=" << format_number(pts[failed]) << ": " << failure << '\n';
                return kExitNumerical;
            }
            break;
        }
        case Command::moments:
            rows.push_back({"mean", d.mean(), 0.0, "spectrum", {}});
            rows.push_back({"variance", d.variance(), 0.0, "spectrum", {}});
            break;
        case Command::validate:
            break;
    }
    emit_rows(spec, rows, *sink);
    return kExitOk;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    RunSpec spec;
    try {
        spec = parse_args(args);
    } catch (const HelpRequested& h) {
        out << h.what();
        return kExitOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\nRun with --help for usage.\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
    try {
        return run(spec, out, err);
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace gammasum::cli
