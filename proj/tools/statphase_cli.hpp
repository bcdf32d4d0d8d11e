#pragma once

// Command implementations behind the statphase executable. Everything here
// works in THz and normalized lengths/times at the boundary and returns plain
// tables so the same code serves CSV, JSON and the tests.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include "statphase/statphase.hpp"

namespace statphase::cli {

enum ExitCode : int {
    kOk = 0,
    kValidationFailed = 1,
    kInvalidInput = 2,
    kNoConvergence = 3,
    kNoRootInBand = 4,
    kSolverError = 5,
};

inline int exit_code_for(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::None:
        return kOk;
    case ErrorCode::InvalidArgument:
    case ErrorCode::UnsupportedTrajectory:
    case ErrorCode::SuperluminalMach:
    case ErrorCode::DegenerateMedium:
    case ErrorCode::ZeroFrequency:
        return kInvalidInput;
    case ErrorCode::NoConvergence:
    case ErrorCode::NoConvergenceInR:
    case ErrorCode::NotAContraction:
    case ErrorCode::LeftPropagatingBand:
        return kNoConvergence;
    case ErrorCode::NoRootInBand:
    case ErrorCode::MultipleRoots:
        return kNoRootInBand;
    default:
        return kSolverError;
    }
}

/// Bad configuration or flag values.
class InputError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Tables

using Cell = std::variant<std::monostate, double, long long, bool, std::string>;

struct Table
{
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    /// Scalars reported next to the rows (JSON field, CSV trailer on stderr).
    std::vector<std::pair<std::string, Cell>> summary;
};

inline std::string format_number(double x)
{
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

inline std::string format_cell(const Cell& c)
{
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return "";
            } else if constexpr (std::is_same_v<T, double>) {
                return format_number(v);
            } else if constexpr (std::is_same_v<T, long long>) {
                return std::to_string(v);
            } else if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else {
                return v;
            }
        },
        c);
}

inline void write_csv(std::ostream& os, const Table& table)
{
    for (size_t i = 0; i < table.columns.size(); ++i) {
        os << (i ? "," : "") << table.columns[i];
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            os << (i ? "," : "") << format_cell(row[i]);
        }
        os << '\n';
    }
}

inline nlohmann::ordered_json to_json(const Cell& c)
{
    return std::visit(
        [](const auto& v) -> nlohmann::ordered_json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return nullptr;
            } else if constexpr (std::is_same_v<T, double>) {
                // Same 9 significant digits as the CSV.
                if (!std::isfinite(v)) {
                    return nullptr;
                }
                return std::stod(format_number(v));
            } else {
                return v;
            }
        },
        c);
}

inline void write_json(std::ostream& os, const Table& table)
{
    nlohmann::ordered_json doc;
    doc["columns"] = table.columns;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj;
        for (size_t i = 0; i < row.size(); ++i) {
            obj[table.columns[i]] = to_json(row[i]);
        }
        rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    if (!table.summary.empty()) {
        nlohmann::ordered_json summary;
        for (const auto& [key, value] : table.summary) {
            summary[key] = to_json(value);
        }
        doc["summary"] = std::move(summary);
    }
    os << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Scenario

enum class Method { Newton, FixedPoint, ClosedForm };
enum class Format { Csv, Json };

inline Method parse_method(const std::string& s)
{
    if (s == "newton") {
        return Method::Newton;
    }
    if (s == "fixed_point" || s == "fixed-point") {
        return Method::FixedPoint;
    }
    if (s == "closed_form" || s == "closed-form") {
        return Method::ClosedForm;
    }
    throw InputError("unknown method '" + s + "' (newton, fixed_point, closed_form)");
}

inline std::string_view to_string(Method m) noexcept
{
    switch (m) {
    case Method::Newton:
        return "newton";
    case Method::FixedPoint:
        return "fixed_point";
    case Method::ClosedForm:
        return "closed_form";
    }
    return "?";
}

inline Format parse_format(const std::string& s)
{
    if (s == "csv") {
        return Format::Csv;
    }
    if (s == "json") {
        return Format::Json;
    }
    throw InputError("unknown format '" + s + "' (csv, json)");
}

inline double parse_double(const std::string& text, const std::string& what)
{
    double value = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw InputError("bad number for " + what + ": '" + text + "'");
    }
    return value;
}

/**
 * Medium grammar: `lorentz`, `vacuum`, `plasma:<f_p THz>` or
 * `nondispersive:<eps>:<mu>`.
 */
inline DispersionModel parse_medium(const std::string& spec, const Normalization& norm = {})
{
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ':');) {
        parts.push_back(item);
    }
    if (parts.empty()) {
        throw InputError("empty medium");
    }
    const std::string& kind = parts.front();
    try {
        if (kind == "lorentz" && parts.size() == 1) {
            return DispersionModel(LorentzMetamaterial::reference(norm));
        }
        if (kind == "vacuum" && parts.size() == 1) {
            return DispersionModel(NonDispersive{1.0, 1.0});
        }
        if (kind == "plasma" && parts.size() == 2) {
            return DispersionModel(
                ColdPlasma{norm.omega_from_thz(parse_double(parts[1], "plasma frequency"))});
        }
        if (kind == "nondispersive" && parts.size() == 3) {
            return DispersionModel(
                NonDispersive{parse_double(parts[1], "eps"), parse_double(parts[2], "mu")});
        }
    } catch (const Error& e) {
        throw InputError(std::string("medium '") + spec + "': " + e.what());
    }
    throw InputError("unknown medium '" + spec +
                     "' (lorentz, vacuum, plasma:<f_p_thz>, nondispersive:<eps>:<mu>)");
}

struct Sweep
{
    double start_thz = 410.0;
    double end_thz = 432.0;
    int points = 200;
};

struct Scenario
{
    std::string medium = "lorentz";
    double f0_thz = 420.0;
    double v = 0.5;
    double height = 0.0;  ///< source path x0 = (0, v tau, height)
    double x1 = 0.01;
    double x2 = 1.595;
    double x3 = 0.0;
    double t = 2.0;
    Method method = Method::Newton;
    double tol = 1e-10;
    int max_iter = 100;
    Format format = Format::Csv;
    std::string out;
    Sweep sweep;
    unsigned threads = 1;
    double length_scale = 75e-9;

    Normalization normalization() const { return Normalization{length_scale, 299792458.0}; }

    void validate() const
    {
        auto finite = [](double x) { return std::isfinite(x); };
        if (!(finite(f0_thz) && finite(v) && finite(height) && finite(x1) && finite(x2) &&
              finite(x3) && finite(t))) {
            throw InputError("scenario values must be finite");
        }
        if (f0_thz < 0.0) {
            throw InputError("f0_thz must be >= 0");
        }
        if (!(v > -1.0 && v < 1.0)) {
            throw InputError("source speed v must lie in (-1, 1)");
        }
        if (!(tol > 0.0) || max_iter < 1) {
            throw InputError("tol must be positive and max_iter >= 1");
        }
        if (!(length_scale > 0.0)) {
            throw InputError("length_scale must be positive");
        }
        if (threads < 1) {
            throw InputError("threads must be >= 1");
        }
    }
};

/**
 * Reads an INI scenario. Sections and keys:
 *   [medium]   model = lorentz | vacuum | plasma:<f_p_thz> | nondispersive:<eps>:<mu>
 *              length_scale_m
 *   [source]   f0_thz, v, height
 *   [observer] x1, x2, x3, t
 *   [solve]    method = newton | fixed_point | closed_form, tol, max_iter, threads
 *   [output]   format = csv | json, path
 *   [sweep]    start_thz, end_thz, points
 * Missing keys keep their defaults; unknown sections or keys are rejected.
 */
inline Scenario load_scenario(std::istream& in, Scenario base = {})
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw InputError(std::string("scenario: ") + e.what());
    }
    static const std::map<std::string, std::vector<std::string>> known{
        {"medium", {"model", "length_scale_m"}},
        {"source", {"f0_thz", "v", "height"}},
        {"observer", {"x1", "x2", "x3", "t"}},
        {"solve", {"method", "tol", "max_iter", "threads"}},
        {"output", {"format", "path"}},
        {"sweep", {"start_thz", "end_thz", "points"}},
    };
    for (const auto& [section, keys] : tree) {
        const auto it = known.find(section);
        if (it == known.end()) {
            throw InputError("scenario: unknown section [" + section + "]");
        }
        for (const auto& [key, value] : keys) {
            if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
                throw InputError("scenario: unknown key " + section + "." + key);
            }
        }
    }

    auto num = [&](const char* path, double& target) {
        if (auto v = tree.get_optional<std::string>(path)) {
            target = parse_double(*v, path);
        }
    };
    auto integer = [&](const char* path, auto& target) {
        if (auto v = tree.get_optional<std::string>(path)) {
            const double d = parse_double(*v, path);
            if (d != std::floor(d)) {
                throw InputError(std::string("expected an integer for ") + path);
            }
            target = static_cast<std::decay_t<decltype(target)>>(d);
        }
    };

    Scenario s = base;
    if (auto m = tree.get_optional<std::string>("medium.model")) {
        s.medium = *m;
    }
    num("medium.length_scale_m", s.length_scale);
    num("source.f0_thz", s.f0_thz);
    num("source.v", s.v);
    num("source.height", s.height);
    num("observer.x1", s.x1);
    num("observer.x2", s.x2);
    num("observer.x3", s.x3);
    num("observer.t", s.t);
    if (auto m = tree.get_optional<std::string>("solve.method")) {
        s.method = parse_method(*m);
    }
    num("solve.tol", s.tol);
    integer("solve.max_iter", s.max_iter);
    double threads = s.threads;
    num("solve.threads", threads);
    if (threads < 1 || threads != std::floor(threads)) {
        throw InputError("solve.threads must be a positive integer");
    }
    s.threads = static_cast<unsigned>(threads);
    if (auto f = tree.get_optional<std::string>("output.format")) {
        s.format = parse_format(*f);
    }
    if (auto p = tree.get_optional<std::string>("output.path")) {
        s.out = *p;
    }
    num("sweep.start_thz", s.sweep.start_thz);
    num("sweep.end_thz", s.sweep.end_thz);
    integer("sweep.points", s.sweep.points);
    return s;
}

inline Scenario load_scenario_file(const std::string& path, Scenario base = {})
{
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open scenario file '" + path + "'");
    }
    return load_scenario(in, std::move(base));
}

// ---------------------------------------------------------------------------
// dispersion-sweep

inline void check_range(double start, double end, int points)
{
    if (!(std::isfinite(start) && std::isfinite(end) && start > 0.0 && start < end)) {
        throw InputError("frequency range must satisfy 0 < start < end");
    }
    if (points < 2) {
        throw InputError("a sweep needs at least two points");
    }
}

inline double grid_point(double start, double end, int points, int i)
{
    return i == points - 1 ? end : start + (end - start) * i / (points - 1);
}

inline Table dispersion_sweep(const DispersionModel& model, double start_thz, double end_thz,
                              int points, const Normalization& norm = {})
{
    check_range(start_thz, end_thz, points);
    Table table;
    table.columns = {"f_thz", "re_n", "im_n", "v_p", "v_g"};
    for (int i = 0; i < points; ++i) {
        const double f = grid_point(start_thz, end_thz, points, i);
        const auto s = sample(model, Frequency::from_thz(f, norm));
        std::vector<Cell> row{f, s.n.real(), s.n.imag(), std::monostate{}, std::monostate{}};
        if (s.propagating) {
            row[3] = s.v_phase;
            row[4] = s.v_group;
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

// ---------------------------------------------------------------------------
// doppler

struct DopplerReport
{
    double f0_thz = 0.0;
    double f_thz = 0.0;
    double tau = 0.0;
    double residual = 0.0;          ///< |grad S| at the solution
    double identity_residual = 0.0; ///< |omega - omega0 - k v_rad|
    DopplerKind classification = DopplerKind::NoShift;
    double det = 0.0;
    int signature = 0;
    bool degenerate = false;
    std::string solver;
    double closed_form_mismatch = std::numeric_limits<double>::quiet_NaN();
};

inline PhaseContext make_context(const Scenario& s, const DispersionModel& model)
{
    const auto norm = s.normalization();
    return PhaseContext{s.t,
                        Vec3{s.x1, s.x2, s.x3},
                        norm.omega_from_thz(s.f0_thz),
                        Trajectory(OffsetLine{s.v, s.height}),
                        model,
                        1.0,
                        norm};
}

inline DopplerReport report_point(const Scenario& s, const PhaseContext& ctx, double omega,
                                  double tau, std::string solver)
{
    DopplerReport r;
    r.f0_thz = s.f0_thz;
    r.f_thz = ctx.normalization.thz_from_omega(omega);
    r.tau = tau;
    r.solver = std::move(solver);
    const auto local = phase_local(ctx, omega, tau);
    r.residual = norm(local.gradient);
    const double k = local.medium.k.real();
    r.identity_residual = std::abs(omega - ctx.omega0 - k * local.geom.v_rad);
    r.classification = doppler_classification(k, local.geom.v_rad);
    const auto c = inspect(local.hessian);
    r.det = c.det;
    r.signature = c.signature;
    r.degenerate = c.degenerate;
    return r;
}

inline StationaryPoint require_converged(StationaryPoint sp)
{
    if (!sp.converged) {
        throw Error(sp.status == ErrorCode::None ? ErrorCode::NoConvergence : sp.status,
                    "solver did not converge");
    }
    return sp;
}

/**
 * Solves one scenario. Newton on a Lorentz medium with a planar geometry uses
 * the dedicated line (x1 = 0) and planar solvers; otherwise Newton starts
 * from the default seed and falls back to a seed grid.
 */
inline DopplerReport solve_doppler(const Scenario& s)
{
    s.validate();
    const auto model = parse_medium(s.medium, s.normalization());
    const auto ctx = make_context(s, model);
    NewtonOptions newton;
    newton.tol = s.tol;
    newton.max_iter = s.max_iter;

    switch (s.method) {
    case Method::ClosedForm: {
        const auto sp = solve_closed_form(ctx);
        return report_point(s, ctx, sp.omega_s, sp.tau_s, "closed_form");
    }
    case Method::FixedPoint: {
        FixedPointOptions fp;
        fp.tol = s.tol;
        fp.max_iter = std::max(s.max_iter, 200);
        const auto sp = require_converged(solve_fixed_point(ctx, fp));
        return report_point(s, ctx, sp.omega_s, sp.tau_s, "fixed_point");
    }
    case Method::Newton:
        break;
    }

    const bool planar = s.x3 == 0.0 && s.height == 0.0;
    if (model.is<LorentzMetamaterial>() && planar && s.v != 0.0) {
        if (s.x1 == 0.0) {
            const auto line =
                metamaterial_doppler_line(model, ctx.omega0, s.v, s.x2, s.t);
            return report_point(s, ctx, line.omega, line.tau,
                                line.approaching ? "line-approaching" : "line-receding");
        }
        const auto planar_sol =
            metamaterial_doppler_2d(model, ctx.omega0, s.v, s.x1, s.x2, s.t, newton);
        auto r = report_point(s, ctx, planar_sol.omega, planar_sol.tau, "planar-newton");
        r.closed_form_mismatch = planar_sol.closed_form_mismatch;
        return r;
    }

    std::optional<StationaryPoint> sp;
    try {
        const auto first = solve_newton(ctx, default_seed(ctx), newton);
        if (first.converged) {
            sp = first;
        }
    } catch (const Error&) {
    }
    if (!sp) {
        const auto all = find_stationary_points(ctx, {}, newton);
        if (all.empty()) {
            throw Error(ErrorCode::NoConvergence, "no stationary point found from any seed");
        }
        sp = *std::min_element(all.begin(), all.end(), [&](const auto& a, const auto& b) {
            return std::abs(a.omega_s - ctx.omega0) < std::abs(b.omega_s - ctx.omega0);
        });
    }
    return report_point(s, ctx, sp->omega_s, sp->tau_s, "newton");
}

inline Table doppler_table(const DopplerReport& r)
{
    Table table;
    table.columns = {"f0_thz",      "f_shift_thz", "tau",       "residual", "identity_residual",
                     "classification", "det_hessian", "signature", "degenerate", "solver",
                     "closed_form_mismatch"};
    std::vector<Cell> row{r.f0_thz,
                          r.f_thz,
                          r.tau,
                          r.residual,
                          r.identity_residual,
                          std::string(to_string(r.classification)),
                          r.det,
                          static_cast<long long>(r.signature),
                          r.degenerate,
                          r.solver,
                          std::monostate{}};
    if (std::isfinite(r.closed_form_mismatch)) {
        row.back() = r.closed_form_mismatch;
    }
    table.rows.push_back(std::move(row));
    return table;
}

// ---------------------------------------------------------------------------
// doppler-sweep

/// Largest distance of (x, y) from the secant through the first and last finite rows.
inline double nonlinearity(const std::vector<double>& x, const std::vector<double>& y)
{
    std::vector<size_t> ok;
    for (size_t i = 0; i < x.size(); ++i) {
        if (std::isfinite(x[i]) && std::isfinite(y[i])) {
            ok.push_back(i);
        }
    }
    if (ok.size() < 3) {
        return 0.0;
    }
    const size_t a = ok.front();
    const size_t b = ok.back();
    const double slope = (y[b] - y[a]) / (x[b] - x[a]);
    double worst = 0.0;
    for (size_t i : ok) {
        worst = std::max(worst, std::abs(y[i] - (y[a] + slope * (x[i] - x[a]))));
    }
    return worst;
}

struct SweepRow
{
    double f0_thz = 0.0;
    double f_thz = std::numeric_limits<double>::quiet_NaN();
    double tau = std::numeric_limits<double>::quiet_NaN();
    std::string error;
};

struct SweepResult
{
    std::vector<SweepRow> rows;
    double nonlinearity_thz = 0.0;
    int failures = 0;
};

/// Rows are solved independently (optionally on several threads) and kept in input order.
inline SweepResult doppler_sweep(const Scenario& base, double start_thz, double end_thz, int points)
{
    check_range(start_thz, end_thz, points);
    base.validate();
    parse_medium(base.medium, base.normalization());

    SweepResult out;
    out.rows.resize(static_cast<size_t>(points));
    auto solve_row = [&](int i) {
        SweepRow& row = out.rows[static_cast<size_t>(i)];
        row.f0_thz = grid_point(start_thz, end_thz, points, i);
        Scenario s = base;
        s.f0_thz = row.f0_thz;
        try {
            const auto r = solve_doppler(s);
            row.f_thz = r.f_thz;
            row.tau = r.tau;
        } catch (const Error& e) {
            row.error = std::string(to_string(e.code()));
        }
    };
    const unsigned workers = std::min<unsigned>(base.threads, static_cast<unsigned>(points));
    if (workers <= 1) {
        for (int i = 0; i < points; ++i) {
            solve_row(i);
        }
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (int i = static_cast<int>(w); i < points; i += static_cast<int>(workers)) {
                    solve_row(i);
                }
            });
        }
    }

    std::vector<double> xs, ys;
    for (const auto& row : out.rows) {
        xs.push_back(row.f0_thz);
        ys.push_back(row.f_thz);
        out.failures += row.error.empty() ? 0 : 1;
    }
    out.nonlinearity_thz = nonlinearity(xs, ys);
    return out;
}

inline Table sweep_table(const SweepResult& r)
{
    Table table;
    table.columns = {"f0_thz", "f_shift_thz", "tau", "error"};
    for (const auto& row : r.rows) {
        table.rows.push_back({row.f0_thz,
                              row.error.empty() ? Cell{row.f_thz} : Cell{},
                              row.error.empty() ? Cell{row.tau} : Cell{},
                              row.error});
    }
    table.summary = {{"nonlinearity_thz", r.nonlinearity_thz},
                     {"failures", static_cast<long long>(r.failures)}};
    return table;
}

// ---------------------------------------------------------------------------
// plasma

/// Closed form and Newton on the same plasma scenario, with their relative difference.
inline Table plasma_compare(const Scenario& base)
{
    Scenario s = base;
    const auto model = parse_medium(s.medium, s.normalization());
    if (!model.is<ColdPlasma>()) {
        throw InputError("the plasma command needs --medium plasma:<f_p_thz>");
    }
    s.method = Method::ClosedForm;
    const auto closed = solve_doppler(s);
    s.method = Method::Newton;
    const auto newton = solve_doppler(s);

    Table table;
    table.columns = {"method", "f_shift_thz", "tau", "residual", "classification"};
    for (const auto* r : {&closed, &newton}) {
        table.rows.push_back({r->solver, r->f_thz, r->tau, r->residual,
                              std::string(to_string(r->classification))});
    }
    table.summary = {{"relative_difference", std::abs(newton.f_thz - closed.f_thz) / closed.f_thz}};
    return table;
}

// ---------------------------------------------------------------------------
// cherenkov

/// Charge moving along +x3 at speed v; the observer and time come from the scenario.
inline Table cherenkov_table(const Scenario& s)
{
    s.validate();
    const auto model = parse_medium(s.medium, s.normalization());
    const auto res = cherenkov_solve(model, Vec3{0.0, 0.0, s.v}, Vec3{s.x1, s.x2, s.x3}, s.t);
    const auto& fc = res.contribution;
    Table table;
    table.columns = {"cone_angle_rad", "gate", "gate_argument", "f_thz", "tau",
                     "abs_H",          "abs_E", "reason"};
    const double omega = fc.point.omega_s;
    table.rows.push_back({res.cone_angle, fc.gate, res.gate_argument,
                          fc.point.converged && std::isfinite(omega) ? Cell{s.normalization().thz_from_omega(omega)} : Cell{},
                          fc.point.converged ? Cell{fc.point.tau_s} : Cell{}, norm(fc.H), norm(fc.E),
                          std::string(to_string(res.reason))});
    return table;
}

// ---------------------------------------------------------------------------
// validate

struct Check
{
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

inline const std::vector<std::string>& validation_cases()
{
    static const std::vector<std::string> cases{"fresnel",           "saddle",
                                                "plasma-closed-form", "stationary-source",
                                                "metamaterial-point",        "cherenkov"};
    return cases;
}

inline Check check(std::string name, double measured, double tolerance, std::string detail = {})
{
    return Check{std::move(name), std::isfinite(measured) && measured <= tolerance, measured,
                 tolerance, std::move(detail)};
}

inline std::vector<Check> validate_fresnel()
{
    std::vector<Check> out;
    const auto model = ModelCase::fresnel();
    for (const double lam : {20.0, 40.0}) {
        OscillatoryIntegrand ig{model.amplitude, model.phase, lam, 0.0, {}, {}};
        const auto r = oscillatory_integral_2d(ig, model.R0, 1e-6);
        const auto exact = model.exact(lam);
        out.push_back(check("fresnel lambda=" + format_number(lam),
                            std::abs(r.value - exact) / std::abs(exact), 1e-6));
    }
    return out;
}

inline std::vector<Check> validate_saddle()
{
    const auto study = convergence_rate_study(ModelCase::gaussian_saddle(), {20.0, 40.0, 80.0});
    std::vector<Check> out;
    for (const auto& row : study.rows) {
        out.push_back(check("saddle lambda=" + format_number(row.lambda), row.relative_error,
                            5.0 / row.lambda));
    }
    out.push_back(check("saddle slope", std::abs(study.slope + 1.1), 0.4,
                        "slope " + format_number(study.slope)));
    for (size_t i = 0; i < study.ratios.size(); ++i) {
        out.push_back(check("saddle ratio " + std::to_string(i), std::abs(study.ratios[i] - 2.0),
                            0.5, "ratio " + format_number(study.ratios[i])));
    }
    return out;
}

inline std::vector<Check> validate_plasma()
{
    double worst = 0.0;
    int solved = 0;
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            const double mach = 0.8 * i / 4.0;
            const double ratio = 1.2 + (5.0 - 1.2) * j / 4.0;
            PhaseContext ctx{10.0, Vec3{0.0, 10.0, 0.0}, ratio, Trajectory(OffsetLine{mach, 0.0}),
                             DispersionModel(ColdPlasma{1.0}), 1.0, {}};
            const auto closed = solve_closed_form(ctx);
            const auto newton = solve_newton(ctx, default_seed(ctx));
            if (newton.converged) {
                ++solved;
                worst = std::max(worst, std::abs(newton.omega_s - closed.omega_s) / closed.omega_s);
            } else {
                worst = std::numeric_limits<double>::infinity();
            }
        }
    }
    return {check("plasma grid", worst, 1e-9, std::to_string(solved) + "/25 converged")};
}

inline std::vector<Check> validate_stationary_source()
{
    const DispersionModel plasma(ColdPlasma{1.0});
    PhaseContext ctx{5.0, Vec3{0.3, -0.4, 1.2}, 2.0, Trajectory(OffsetLine{0.0, 0.0}), plasma, 1.0, {}};
    const auto sp = solve_closed_form(ctx);
    const double vg = sample(plasma, Frequency{2.0}).v_group;
    const double r = norm(ctx.x);
    return {check("stationary omega", std::abs(sp.omega_s - 2.0), 0.0),
            check("stationary det", std::abs(sp.det + 1.0), 1e-12),
            check("stationary signature", std::abs(sp.signature), 0.0),
            check("stationary delay", std::abs((ctx.t - sp.tau_s) - r / vg) / (r / vg), 1e-10)};
}

inline std::vector<Check> validate_metamaterial_point()
{
    Scenario s;
    const auto planar = solve_doppler(s);
    s.x1 = 0.0;
    const auto line = solve_doppler(s);
    return {check("metamaterial planar f_thz", std::abs(planar.f_thz - 417.82), 0.5,
                  "f " + format_number(planar.f_thz)),
            check("metamaterial planar tau", std::abs(planar.tau - 3.1901), 0.02,
                  "tau " + format_number(planar.tau)),
            check("metamaterial planar residual", planar.residual, 1e-9),
            check("metamaterial line f_thz", std::abs(line.f_thz - 428.9), 0.5,
                  "f " + format_number(line.f_thz)),
            check("metamaterial line tau", std::abs(line.tau - 3.1694), 0.02,
                  "tau " + format_number(line.tau))};
}

inline std::vector<Check> validate_cherenkov()
{
    const auto slow = cherenkov_solve(DispersionModel(NonDispersive{4.0, 1.0}), Vec3{0.0, 0.0, 0.75},
                                      Vec3{1.0, 0.0, 0.0}, 5.0);
    const auto vacuum = cherenkov_solve(DispersionModel(NonDispersive{1.0, 1.0}),
                                        Vec3{0.0, 0.0, 0.5}, Vec3{1.0, 0.0, 0.0}, 5.0);
    return {check("cherenkov cone angle", std::abs(slow.cone_angle - std::acos(2.0 / 3.0)), 1e-8),
            check("cherenkov vacuum", vacuum.reason == ErrorCode::NoCherenkovRoot ? 0.0 : 1.0, 0.0,
                  std::string(to_string(vacuum.reason)))};
}

inline std::vector<Check> run_validation(const std::string& name)
{
    if (name == "all") {
        std::vector<Check> all;
        for (const auto& c : validation_cases()) {
            auto part = run_validation(c);
            all.insert(all.end(), part.begin(), part.end());
        }
        return all;
    }
    try {
        if (name == "fresnel") {
            return validate_fresnel();
        }
        if (name == "saddle") {
            return validate_saddle();
        }
        if (name == "plasma-closed-form") {
            return validate_plasma();
        }
        if (name == "stationary-source") {
            return validate_stationary_source();
        }
        if (name == "metamaterial-point") {
            return validate_metamaterial_point();
        }
        if (name == "cherenkov") {
            return validate_cherenkov();
        }
    } catch (const Error& e) {
        return {Check{name, false, std::numeric_limits<double>::quiet_NaN(), 0.0,
                      std::string(to_string(e.code())) + ": " + e.what()}};
    }
    throw InputError("unknown validation case '" + name + "'");
}

inline Table validation_table(const std::vector<Check>& checks)
{
    Table table;
    table.columns = {"check", "status", "measured", "tolerance", "detail"};
    bool all = true;
    for (const auto& c : checks) {
        table.rows.push_back(
            {c.name, std::string(c.passed ? "pass" : "fail"), c.measured, c.tolerance, c.detail});
        all = all && c.passed;
    }
    table.summary = {{"passed", all}};
    return table;
}

} // namespace statphase::cli
