#include <puffer/cli.hpp>
#include <puffer/errors.hpp>
#include <puffer/estimators.hpp>
#include <puffer/preconditioners.hpp>
#include <puffer/solver.hpp>
#include <puffer/verify.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace puffer::cli {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* version = "0.1.0";

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_csv_line(std::string_view line)
{
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

bool parse_double(std::string_view s, double& out)
{
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size() && std::isfinite(out);
}

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> parse_grid(const std::string& text)
{
    std::vector<double> out;
    for (auto cell : split_csv_line(text)) {
        double v;
        if (!parse_double(cell, v)) throw InputError("--lambda-grid: '" + std::string(cell) + "' is not a number");
        out.push_back(v);
    }
    return out;
}

std::string_view to_string(Command c)
{
    switch (c) {
        case Command::fit: return "fit";
        case Command::path: return "path";
        case Command::precondition: return "precondition";
        case Command::verify: return "verify";
        case Command::inspect: return "inspect";
    }
    return "unknown";
}

std::string_view to_string(Transform t)
{
    switch (t) {
        case Transform::none: return "none";
        case Transform::puffer: return "puffer";
        case Transform::puffer_scaled: return "puffer_scaled";
        case Transform::puffer_tau: return "puffer_tau";
    }
    return "unknown";
}

json vec_json(const Vector& v)
{
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json penalty_json(const PenaltySpec& p)
{
    return {{"kind", puffer::to_string(p.kind)}, {"param", p.param}};
}

json fit_json(const solver::FitResult& f)
{
    json active = json::array();
    for (auto j : f.active_set) active.push_back(j);
    return {
        {"lambda", f.lambda},
        {"penalty", penalty_json(f.penalty)},
        {"beta", vec_json(f.beta)},
        {"active_set", active},
        {"iterations", f.iterations},
        {"converged", f.converged},
        {"kkt_residual", f.kkt_residual},
        {"objective", f.objective},
    };
}

json report_json(const verify::TheoremReport& r)
{
    json j = {
        {"theorem_id", verify::to_string(r.id)},
        {"trials", r.trials},
        {"max_discrepancy", r.max_discrepancy},
        {"tolerance", r.tolerance},
        {"passed", r.passed},
        {"worst_case_seed", r.worst_case_seed},
        {"comparisons", r.comparisons},
        {"excluded", r.excluded},
        {"excluded_reason", r.excluded_reason},
        {"kkt_checked", r.kkt_checked},
        {"kkt_failed", r.kkt_failed},
        {"kkt_max_residual", r.kkt_max_residual},
    };
    if (r.id == verify::TheoremId::eq10_gap) j["multi_minimum_runs"] = r.multi_minimum_runs;
    if (r.control_discrepancy) {
        j["negative_control"] = {
            {"discrepancy", *r.control_discrepancy},
            {"threshold", r.control_threshold},
            {"passed", r.control_passed},
        };
    }
    return j;
}

json meta_json(const RunConfig& c)
{
    json cfg = {
        {"command", to_string(c.command)},
        {"input", c.input_path},
        {"response", c.response_column},
        {"penalty", penalty_json(c.penalty)},
        {"transform", to_string(c.transform)},
    };
    if (c.lambda) cfg["lambda"] = *c.lambda;
    if (!c.lambda_grid.empty()) cfg["lambda_grid"] = c.lambda_grid;
    if (c.tau) cfg["tau"] = *c.tau;
    if (c.sigma) cfg["sigma"] = *c.sigma;
    if (c.command == Command::verify) cfg["trials"] = c.trials;
    return {{"version", version}, {"seed", c.seed}, {"config", cfg}};
}

struct Prepared
{
    Matrix x;
    Vector y;
    std::optional<Vector> n_diag;
};

Prepared apply_transform(const Dataset& d, const RunConfig& c)
{
    switch (c.transform) {
        case Transform::none:
            return {d.x, d.y, std::nullopt};
        case Transform::puffer: {
            auto p = precond::puffer(d.x, d.y);
            return {std::move(p.x_tilde), std::move(p.y_tilde), std::nullopt};
        }
        case Transform::puffer_scaled: {
            auto p = precond::puffer_scaled(d.x, d.y);
            return {std::move(p.x_tilde), std::move(p.y_tilde), std::move(p.n_diag)};
        }
        case Transform::puffer_tau: {
            auto p = precond::puffer_tau(d.x, d.y, *c.tau);
            return {std::move(p.x_tilde), std::move(p.y_tilde), std::nullopt};
        }
    }
    throw InputError("unknown transform");
}

solver::SolverConfig solver_config(const RunConfig& c)
{
    solver::SolverConfig s;
    s.rng_seed = c.seed;
    return s;
}

std::string names_header(const Dataset& d)
{
    std::string h;
    for (std::size_t j = 0; j < d.column_names.size(); ++j) {
        if (j) h += ',';
        h += d.column_names[j];
    }
    return h;
}

// Writes to the output path when set, else to `out`.
void emit(const RunConfig& c, std::ostream& out, const std::string& text)
{
    if (c.output_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(c.output_path, std::ios::binary);
    if (!f) throw InputError("cannot open output file '" + c.output_path + "'");
    f << text;
    if (!f) throw InputError("failed writing output file '" + c.output_path + "'");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int run_fit(const RunConfig& c, std::ostream& out)
{
    const auto d = load_dataset(c.input_path, c.response_column);
    const auto prep = apply_transform(d, c);
    const auto fit = solver::solve(prep.x, prep.y, *c.lambda, c.penalty, std::nullopt, solver_config(c));

    if (c.output_format == OutputFormat::csv) {
        std::string text = "column,coefficient\n";
        for (std::size_t j = 0; j < d.column_names.size(); ++j) {
            text += d.column_names[j] + "," + format_double(fit.beta(static_cast<Index>(j))) + "\n";
        }
        emit(c, out, text);
        return exit_ok;
    }
    json result = {{"columns", d.column_names}, {"transform", to_string(c.transform)}, {"fit", fit_json(fit)}};
    if (prep.n_diag) result["n_diag"] = vec_json(*prep.n_diag);
    emit(c, out, dump({{"meta", meta_json(c)}, {"result", result}}));
    return exit_ok;
}

int run_path(const RunConfig& c, std::ostream& out)
{
    const auto d = load_dataset(c.input_path, c.response_column);
    const auto prep = apply_transform(d, c);
    Vector grid;
    if (!c.lambda_grid.empty()) {
        grid = Eigen::Map<const Vector>(c.lambda_grid.data(), static_cast<Index>(c.lambda_grid.size()));
    } else {
        const double top = solver::lambda_max(prep.x, prep.y);
        if (!(top > 0.0)) throw InputError("path: X'y is zero, default lambda grid is empty");
        grid = solver::log_lambda_grid(top, 50, 1e-4);
    }
    const auto path = solver::solve_path(prep.x, prep.y, grid, c.penalty, solver_config(c));

    if (c.output_format == OutputFormat::csv) {
        std::string text = "lambda," + names_header(d) + "\n";
        for (const auto& f : path) {
            text += format_double(f.lambda);
            for (Index j = 0; j < f.beta.size(); ++j) text += "," + format_double(f.beta(j));
            text += "\n";
        }
        emit(c, out, text);
        return exit_ok;
    }
    json fits = json::array();
    for (const auto& f : path) fits.push_back(fit_json(f));
    json result = {{"columns", d.column_names}, {"transform", to_string(c.transform)}, {"path", fits}};
    if (prep.n_diag) result["n_diag"] = vec_json(*prep.n_diag);
    emit(c, out, dump({{"meta", meta_json(c)}, {"result", result}}));
    return exit_ok;
}

int run_precondition(const RunConfig& c, std::ostream& out)
{
    const auto d = load_dataset(c.input_path, c.response_column);
    const auto prep = apply_transform(d, c);
    std::ostringstream text;
    text << d.response_name;
    for (const auto& name : d.column_names) text << ',' << name;
    text << '\n';
    for (Index i = 0; i < prep.x.rows(); ++i) {
        text << format_double(prep.y(i));
        for (Index j = 0; j < prep.x.cols(); ++j) text << ',' << format_double(prep.x(i, j));
        text << '\n';
    }
    emit(c, out, text.str());
    return exit_ok;
}

int run_verify(const RunConfig& c, std::ostream& out)
{
    verify::SuiteOptions opt;
    opt.seed = c.seed;
    opt.trials = c.trials;
    const auto reports = verify::run_all(opt);
    bool all = true;
    json arr = json::array();
    for (const auto& r : reports) {
        all = all && r.ok();
        arr.push_back(report_json(r));
    }
    emit(c, out, dump({{"meta", meta_json(c)}, {"result", {{"passed", all}, {"reports", arr}}}}));
    return all ? exit_ok : exit_verification_failed;
}

int run_inspect(const RunConfig& c, std::ostream& out)
{
    const auto d = load_dataset(c.input_path, c.response_column);
    if (d.x.rows() <= d.x.cols()) {
        throw InputError("inspect: Z statistics and p-values: requires n>p (got n=" + std::to_string(d.x.rows())
                         + ", p=" + std::to_string(d.x.cols()) + ")");
    }
    const auto inf = estimators::infer(d.x, d.y, c.sigma);
    json result = {
        {"columns", d.column_names},
        {"beta_ols", vec_json(inf.beta_ols)},
        {"z_stats", vec_json(inf.z_stats)},
        {"p_values", vec_json(inf.p_values)},
        {"sigma", inf.sigma},
        {"sigma_source", estimators::to_string(inf.sigma_source)},
    };
    emit(c, out, dump({{"meta", meta_json(c)}, {"result", result}}));
    return exit_ok;
}

} // namespace

Dataset load_dataset(const std::string& path, const std::string& response)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open input file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw InputError(path + ": empty file, header row required");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

    std::vector<std::string> header;
    std::set<std::string> seen;
    for (auto cell : split_csv_line(line)) {
        std::string name(cell);
        if (name.empty()) throw InputError(path + ": line 1: empty column name in header");
        if (!seen.insert(name).second) throw InputError(path + ": line 1: duplicate column name '" + name + "'");
        header.push_back(std::move(name));
    }
    if (header.size() < 2) throw InputError(path + ": need a response and at least one predictor column");

    std::size_t resp = header.size();
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == response) resp = j;
    }
    if (resp == header.size()) {
        std::size_t idx = 0;
        const auto res = std::from_chars(response.data(), response.data() + response.size(), idx);
        if (res.ec == std::errc{} && res.ptr == response.data() + response.size() && idx < header.size()) {
            resp = idx;
        } else {
            throw InputError(path + ": response column '" + response + "' not found in header");
        }
    }

    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw InputError(path + ": line " + std::to_string(lineno) + ": expected " + std::to_string(header.size())
                             + " cells, found " + std::to_string(cells.size()));
        }
        std::vector<double> row(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (cells[j].empty()) {
                throw InputError(path + ": line " + std::to_string(lineno) + ", column '" + header[j]
                                 + "': blank cell");
            }
            if (!parse_double(cells[j], row[j])) {
                throw InputError(path + ": line " + std::to_string(lineno) + ", column '" + header[j]
                                 + "': non-numeric cell '" + std::string(cells[j]) + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) throw InputError(path + ": need at least 2 data rows, found " + std::to_string(rows.size()));

    Dataset d;
    const auto n = static_cast<Index>(rows.size());
    const auto p = static_cast<Index>(header.size() - 1);
    d.x.resize(n, p);
    d.y.resize(n);
    d.response_name = header[resp];
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j != resp) d.column_names.push_back(header[j]);
    }
    for (Index i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        Index col = 0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j == resp) {
                d.y(i) = row[j];
            } else {
                d.x(i, col++) = row[j];
            }
        }
    }
    return d;
}

void save_dataset(const Dataset& d, const std::string& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open '" + path + "' for writing");
    f << d.response_name;
    for (const auto& name : d.column_names) f << ',' << name;
    f << '\n';
    for (Index i = 0; i < d.x.rows(); ++i) {
        f << format_double(d.y(i));
        for (Index j = 0; j < d.x.cols(); ++j) f << ',' << format_double(d.x(i, j));
        f << '\n';
    }
    if (!f) throw InputError("failed writing '" + path + "'");
}

void RunConfig::validate() const
{
    if (command != Command::verify) {
        if (input_path.empty()) throw InputError(std::string(to_string(command)) + ": --input is required");
        if (response_column.empty()) throw InputError(std::string(to_string(command)) + ": --response is required");
    }
    if (lambda && !(*lambda >= 0.0)) throw InputError("--lambda must be nonnegative");
    for (double l : lambda_grid) {
        if (!(l >= 0.0)) throw InputError("--lambda-grid values must be nonnegative");
    }
    if (command == Command::fit) {
        if (!lambda || !lambda_grid.empty()) throw InputError("fit: give exactly one --lambda (no --lambda-grid)");
    }
    if (command == Command::path && lambda) throw InputError("path: use --lambda-grid, not --lambda");
    if (transform == Transform::puffer_tau && !tau) throw InputError("--transform puffer_tau requires --tau");
    if (tau && !(*tau >= 0.0)) throw InputError("--tau must be nonnegative");
    if (sigma && !(*sigma > 0.0)) throw InputError("--sigma must be positive");
    if (command == Command::precondition && transform == Transform::none) {
        throw InputError("precondition: --transform must be puffer, puffer_scaled or puffer_tau");
    }
    if (trials < 1) throw InputError("--trials must be >= 1");
    penalty.validate();
}

std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out)
{
    CLI::App app{"Preconditioned penalized least squares"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string penalty = "lasso";
    std::optional<double> penalty_param;
    std::string grid_text;
    std::string transform = "none";
    std::string format = "json";

    const std::map<std::string, Command> commands = {
        {"fit", Command::fit},
        {"path", Command::path},
        {"precondition", Command::precondition},
        {"verify", Command::verify},
        {"inspect", Command::inspect},
    };
    const std::map<std::string, std::string> help = {
        {"fit", "Fit one penalized regression"},
        {"path", "Fit a warm-started lambda path"},
        {"precondition", "Write the preconditioned (X, Y) as CSV"},
        {"verify", "Run the equivalence verification harness"},
        {"inspect", "OLS coefficients, Z statistics and p-values"},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, cmd] : commands) {
        auto* sub = app.add_subcommand(name, help.at(name));
        sub->add_option("--input", cfg.input_path, "CSV file with a header row");
        sub->add_option("--response", cfg.response_column, "response column name or 0-based index");
        sub->add_option("--penalty", penalty, "lasso|enet|scad|mcp")->check(CLI::IsMember({"lasso", "enet", "scad", "mcp"}));
        sub->add_option("--penalty-param", penalty_param, "enet alpha, scad a, mcp gamma");
        sub->add_option("--lambda", cfg.lambda, "penalty level");
        sub->add_option("--lambda-grid", grid_text, "comma-separated, strictly descending");
        sub->add_option("--tau", cfg.tau, "ridge parameter for puffer_tau");
        sub->add_option("--sigma", cfg.sigma, "known noise scale");
        sub->add_option("--transform", transform, "none|puffer|puffer_scaled|puffer_tau")
            ->check(CLI::IsMember({"none", "puffer", "puffer_scaled", "puffer_tau"}));
        sub->add_option("--seed", cfg.seed, "RNG seed");
        sub->add_option("--trials", cfg.trials, "base trial count for verify");
        sub->add_option("--output", cfg.output_path, "output file (default stdout)");
        sub->add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw InputError(std::string("usage: ") + e.what());
    }

    for (auto* sub : subs) {
        if (sub->parsed()) {
            cfg.command = commands.at(sub->get_name());
        }
    }
    cfg.penalty = parse_penalty(penalty, penalty_param ? &*penalty_param : nullptr);
    if (!grid_text.empty()) cfg.lambda_grid = parse_grid(grid_text);
    const std::map<std::string, Transform> transforms = {
        {"none", Transform::none},
        {"puffer", Transform::puffer},
        {"puffer_scaled", Transform::puffer_scaled},
        {"puffer_tau", Transform::puffer_tau},
    };
    cfg.transform = transforms.at(transform);
    cfg.output_format = format == "csv" ? OutputFormat::csv : OutputFormat::json;
    cfg.validate();
    return cfg;
}

namespace {

int report_error(std::ostream& err, const char* kind, const std::string& message, int code)
{
    const json rec = {{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
    err << rec.dump() << '\n';
    return code;
}

} // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    try {
        cfg.validate();
        switch (cfg.command) {
            case Command::fit: return run_fit(cfg, out);
            case Command::path: return run_path(cfg, out);
            case Command::precondition: return run_precondition(cfg, out);
            case Command::verify: return run_verify(cfg, out);
            case Command::inspect: return run_inspect(cfg, out);
        }
        return exit_input_error;
    } catch (const Error& e) {
        const int code = e.kind() == ErrorKind::numerical ? exit_numerical_error : exit_input_error;
        return report_error(err, puffer::to_string(e.kind()), e.what(), code);
    } catch (const std::exception& e) {
        return report_error(err, "numerical", e.what(), exit_numerical_error);
    }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    std::optional<RunConfig> cfg;
    try {
        cfg = parse_args(argc, argv, out);
    } catch (const Error& e) {
        return report_error(err, puffer::to_string(e.kind()), e.what(), exit_input_error);
    }
    if (!cfg) return exit_ok;
    return run(*cfg, out, err);
}

} // namespace puffer::cli
