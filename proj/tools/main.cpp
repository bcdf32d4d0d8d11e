#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "statphase_cli.hpp"

namespace cli = statphase::cli;

namespace {

constexpr const char* kExitCodes = R"(Exit codes:
  0  success
  1  a validation check failed
  2  invalid input (flags, scenario file, medium, ranges)
  3  solver did not converge
  4  no Doppler root in the scanned band (or ambiguous roots)
  5  other solver failure (evanescent regime, below cutoff, ...))";

struct Flags
{
    std::string config;
    std::optional<std::string> medium;
    std::optional<double> f0_thz, v, x1, x2, x3, t, tol;
    std::optional<std::string> method, format, out;
    std::optional<unsigned> threads;
};

void add_scenario_flags(CLI::App& cmd, Flags& f)
{
    cmd.add_option("--config", f.config, "INI scenario file")->check(CLI::ExistingFile);
    cmd.add_option("--medium", f.medium,
                   "lorentz | vacuum | plasma:<f_p_thz> | nondispersive:<eps>:<mu>");
    cmd.add_option("--f0-thz", f.f0_thz, "source frequency in THz");
    cmd.add_option("--v", f.v, "source speed in units of c");
    cmd.add_option("--x1", f.x1, "observer x1");
    cmd.add_option("--x2", f.x2, "observer x2");
    cmd.add_option("--x3", f.x3, "observer x3");
    cmd.add_option("--t", f.t, "observation time");
    cmd.add_option("--method", f.method, "newton | fixed_point | closed_form");
    cmd.add_option("--tol", f.tol, "solver tolerance");
    cmd.add_option("--out", f.out, "output file (default stdout)");
    cmd.add_option("--format", f.format, "csv | json");
    cmd.add_option("--threads", f.threads, "worker threads for sweeps");
}

cli::Scenario resolve(const Flags& f, cli::Scenario base = {})
{
    cli::Scenario s = f.config.empty() ? base : cli::load_scenario_file(f.config, base);
    auto take = [](auto& target, const auto& flag) {
        if (flag) {
            target = *flag;
        }
    };
    take(s.medium, f.medium);
    take(s.f0_thz, f.f0_thz);
    take(s.v, f.v);
    take(s.x1, f.x1);
    take(s.x2, f.x2);
    take(s.x3, f.x3);
    take(s.t, f.t);
    take(s.tol, f.tol);
    take(s.out, f.out);
    take(s.threads, f.threads);
    if (f.method) {
        s.method = cli::parse_method(*f.method);
    }
    if (f.format) {
        s.format = cli::parse_format(*f.format);
    }
    s.validate();
    return s;
}

void emit(const cli::Scenario& s, const cli::Table& table)
{
    std::ofstream file;
    if (!s.out.empty()) {
        file.open(s.out);
        if (!file) {
            throw cli::InputError("cannot write '" + s.out + "'");
        }
    }
    std::ostream& os = s.out.empty() ? std::cout : file;
    if (s.format == cli::Format::Json) {
        cli::write_json(os, table);
        return;
    }
    cli::write_csv(os, table);
    for (const auto& [key, value] : table.summary) {
        std::cerr << key << '=' << cli::format_cell(value) << '\n';
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Stationary-phase fields and Doppler shifts of moving sources in dispersive media"};
    app.footer(kExitCodes);
    app.require_subcommand(1);

    Flags flags;
    cli::Sweep sweep;
    std::optional<double> start, end;
    std::optional<int> points;
    std::string validate_case = "all";

    auto* disp = app.add_subcommand("dispersion-sweep", "refraction index and velocities over a band");
    add_scenario_flags(*disp, flags);
    disp->add_option("--start-thz", start, "first frequency");
    disp->add_option("--end-thz", end, "last frequency");
    disp->add_option("--points", points, "number of grid points");

    auto* doppler = app.add_subcommand("doppler", "received frequency and retarded time at one observer");
    add_scenario_flags(*doppler, flags);

    auto* dsweep = app.add_subcommand("doppler-sweep", "received frequency against source frequency");
    add_scenario_flags(*dsweep, flags);
    dsweep->add_option("--start-thz", start, "first source frequency");
    dsweep->add_option("--end-thz", end, "last source frequency");
    dsweep->add_option("--points", points, "number of source frequencies");

    auto* plasma = app.add_subcommand("plasma", "closed form against Newton in a cold plasma");
    add_scenario_flags(*plasma, flags);

    auto* cherenkov = app.add_subcommand("cherenkov", "Cherenkov cone of a charge moving along +x3");
    add_scenario_flags(*cherenkov, flags);

    auto* validate = app.add_subcommand("validate", "oracle cross-checks and closed-form regressions");
    validate->add_option("case", validate_case)
        ->check(CLI::IsMember({"all", "fresnel", "saddle", "plasma-closed-form", "stationary-source",
                               "metamaterial-point", "cherenkov"}));
    validate->add_option("--out", flags.out, "output file (default stdout)");
    validate->add_option("--format", flags.format, "csv | json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kInvalidInput;
    }

    try {
        if (*validate) {
            cli::Scenario s;
            if (flags.out) {
                s.out = *flags.out;
            }
            if (flags.format) {
                s.format = cli::parse_format(*flags.format);
            }
            const auto checks = cli::run_validation(validate_case);
            emit(s, cli::validation_table(checks));
            const bool ok = std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
            return ok ? cli::kOk : cli::kValidationFailed;
        }

        cli::Scenario base;
        if (*plasma) {
            base.medium = "plasma:300";
            base.f0_thz = 500.0;
            base.x1 = 0.0;
            base.x2 = 10.0;
            base.t = 10.0;
        } else if (*cherenkov) {
            base.medium = "nondispersive:4:1";
            base.v = 0.75;
            base.x1 = 1.0;
            base.x2 = 0.0;
            base.t = 5.0;
        }
        const auto s = resolve(flags, base);

        if (*disp) {
            emit(s, cli::dispersion_sweep(cli::parse_medium(s.medium, s.normalization()),
                                          start.value_or(s.sweep.start_thz), end.value_or(s.sweep.end_thz),
                                          points.value_or(s.sweep.points), s.normalization()));
        } else if (*doppler) {
            emit(s, cli::doppler_table(cli::solve_doppler(s)));
        } else if (*dsweep) {
            const auto r = cli::doppler_sweep(s, start.value_or(s.sweep.start_thz),
                                              end.value_or(s.sweep.end_thz), points.value_or(s.sweep.points));
            emit(s, cli::sweep_table(r));
        } else if (*plasma) {
            emit(s, cli::plasma_compare(s));
        } else if (*cherenkov) {
            emit(s, cli::cherenkov_table(s));
        }
    } catch (const cli::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kInvalidInput;
    } catch (const statphase::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kSolverError;
    }
    return cli::kOk;
}
