// qtunnel: range-bound market toolkit.
//
// Subcommands: transmission (closed-form coefficient, optional quadrature
// cross-check), eigen (box spectrum), potential (barrier profile data),
// scan (breakout detection on CSV bars), simulate (seeded synthetic
// paths). Machine-readable payloads go to stdout, diagnostics to stderr;
// QTUNNEL_LOG={error,warn,info,debug} sets verbosity. Exit codes:
// 0 success, 1 usage error, 2 input/format error, 3 numeric failure.

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtunnel/detector.hpp"
#include "qtunnel/errors.hpp"
#include "qtunnel/market_params.hpp"
#include "qtunnel/marketdata.hpp"
#include "qtunnel/regime.hpp"
#include "qtunnel/report_json.hpp"
#include "qtunnel/spectral.hpp"
#include "qtunnel/synthetic.hpp"
#include "qtunnel/tunneling.hpp"

namespace {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

LogLevel g_log_level = LogLevel::warn;

void init_log_level() {
    const char* env = std::getenv("QTUNNEL_LOG");
    if (!env) return;
    const std::string value(env);
    if (value == "error") g_log_level = LogLevel::error;
    else if (value == "warn") g_log_level = LogLevel::warn;
    else if (value == "info") g_log_level = LogLevel::info;
    else if (value == "debug") g_log_level = LogLevel::debug;
    else std::fprintf(stderr, "qtunnel: ignoring unknown QTUNNEL_LOG value '%s'\n", env);
}

void log_at(LogLevel level, const std::string& message) {
    static const char* names[] = {"error", "warn", "info", "debug"};
    if (static_cast<int>(level) <= static_cast<int>(g_log_level))
        std::fprintf(stderr, "qtunnel: %s: %s\n", names[static_cast<int>(level)],
                     message.c_str());
}

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Write-temp-then-rename so readers never observe a partial file.
void write_output(const std::string& path, const std::string& payload) {
    if (path.empty() || path == "-") {
        std::fwrite(payload.data(), 1, payload.size(), stdout);
        return;
    }
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw qtunnel::ParseError("cannot open output file " + path);
        out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
        if (!out) throw qtunnel::ParseError("failed writing output file " + path);
    }
    std::filesystem::rename(tmp, target);
    log_at(LogLevel::info, "wrote " + path + " (" + std::to_string(payload.size()) + " bytes)");
}

std::string read_input_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qtunnel::ParseError("cannot open input file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

struct TransmissionArgs {
    double rate = 0.0, vol = 0.0, strike = 0.0;
    bool oracle = false;
    double tolerance = qtunnel::kDefaultWkbTolerance;
};

int run_transmission(const TransmissionArgs& args) {
    const qtunnel::MarketParams params(args.rate, args.vol);
    nlohmann::ordered_json j;
    if (args.oracle) {
        const auto report = qtunnel::transmission_report(params, args.strike, args.tolerance);
        j = {{"t_closed", report.t_closed},
             {"t_quadrature", report.t_quadrature},
             {"exponent", report.exponent},
             {"rel_gap", report.rel_gap},
             {"geometry",
              {{"strike", report.geometry.strike},
               {"turning_point", report.geometry.turning_point},
               {"barrier_exists", report.geometry.barrier_exists}}}};
    } else {
        const auto closed = qtunnel::transmission_closed_form(params, args.strike);
        j = {{"t_closed", closed.t_closed},
             {"exponent", closed.exponent},
             {"geometry",
              {{"strike", closed.geometry.strike},
               {"turning_point", closed.geometry.turning_point},
               {"barrier_exists", closed.geometry.barrier_exists}}}};
    }
    std::fputs((j.dump() + "\n").c_str(), stdout);
    return 0;
}

struct EigenArgs {
    double rate = 0.0, vol = 0.0, support = 0.0, resistance = 0.0;
    std::size_t count = 1;
    std::size_t grid_points = 2001;
    bool flat_potential = false;
    std::string eigenfunctions_prefix;
};

int run_eigen(const EigenArgs& args) {
    const qtunnel::MarketParams params(args.rate, args.vol);
    const qtunnel::Box box(args.support, args.resistance, args.grid_points);
    const auto solution = qtunnel::eigen_spectrum(params, box, args.count, args.flat_potential);

    std::string out = "n,lambda_n\n";
    for (std::size_t i = 0; i < solution.eigenvalues.size(); ++i)
        out += std::to_string(i + 1) + "," + format_double(solution.eigenvalues[i]) + "\n";
    out += "# lambda_market," + format_double(qtunnel::lambda_constant(params)) + "\n";
    out += "# resonance_gap," + format_double(qtunnel::resonance_gap(params, solution)) + "\n";
    std::fputs(out.c_str(), stdout);

    if (!args.eigenfunctions_prefix.empty()) {
        for (std::size_t k = 0; k < solution.eigenfunctions.size(); ++k) {
            std::string payload = "s,psi\n";
            for (std::size_t i = 0; i < solution.grid.size(); ++i)
                payload += format_double(solution.grid[i]) + "," +
                           format_double(solution.eigenfunctions[k][i]) + "\n";
            write_output(args.eigenfunctions_prefix + "." + std::to_string(k + 1) + ".csv",
                         payload);
        }
    }
    return 0;
}

struct PotentialArgs {
    double s_min = 0.0, s_max = 0.0;
    std::size_t points = 200;
    std::vector<double> lambda_levels;
};

int run_potential(const PotentialArgs& args) {
    const auto profile =
        qtunnel::barrier_profile(args.s_min, args.s_max, args.points, args.lambda_levels);
    std::string out = "s,v\n";
    for (const auto& [s, v] : profile.samples)
        out += format_double(s) + "," + format_double(v) + "\n";
    for (const auto& mark : profile.annotations)
        out += "# lambda_level," + format_double(mark.level) + ",turning_point," +
               format_double(mark.turning_point) + "\n";
    std::fputs(out.c_str(), stdout);
    return 0;
}

struct ScanArgs {
    std::string input;
    std::string output;
    std::string symbol;
    qtunnel::DetectorConfig detector;
    qtunnel::RegimeParams regime;
};

int run_scan(const ScanArgs& args) {
    const std::string text = read_input_file(args.input);
    const std::string symbol =
        args.symbol.empty() ? std::filesystem::path(args.input).stem().string() : args.symbol;
    const qtunnel::PriceSeries series = qtunnel::parse_csv(text, symbol);
    log_at(LogLevel::info,
           "parsed " + std::to_string(series.bars.size()) + " bars for " + symbol);

    const qtunnel::ScanReport report = qtunnel::scan(series, args.detector, args.regime);
    log_at(LogLevel::info, "found " + std::to_string(report.regimes.size()) + " regime(s), " +
                               std::to_string(report.events.size()) + " event(s)");
    write_output(args.output, qtunnel::scan_report_to_json(report, &series).dump() + "\n");
    return 0;
}

struct SimulateArgs {
    qtunnel::SynthConfig config;
    std::optional<std::size_t> breakout_at;
    double vol_damp = 0.25;
    double drift_per_bar = 0.004;
    std::string direction = "up";
    std::string output;
};

int run_simulate(SimulateArgs& args) {
    if (args.breakout_at) {
        qtunnel::BreakoutSpec spec;
        spec.at_bar = *args.breakout_at;
        spec.vol_damp = args.vol_damp;
        spec.drift_per_bar = args.drift_per_bar;
        spec.direction = qtunnel::direction_from_string(args.direction);
        args.config.breakout = spec;
    }
    const qtunnel::PriceSeries series = qtunnel::generate(args.config);
    write_output(args.output, qtunnel::emit_csv(series));
    return 0;
}

}  // namespace

namespace {

int run_main(int argc, char** argv) {
    init_log_level();

    CLI::App app{"Range-bound market toolkit: box spectra, tunneling transmission "
                 "coefficients and breakout scanning"};
    app.require_subcommand(1);

    TransmissionArgs trans;
    auto* cmd_trans = app.add_subcommand(
        "transmission", "Transmission coefficient for a strike level (JSON to stdout)");
    cmd_trans->add_option("--rate", trans.rate, "Annualized interest rate, > 0")->required();
    cmd_trans->add_option("--vol", trans.vol, "Annualized volatility, > 0")->required();
    cmd_trans->add_option("--strike", trans.strike, "Normalized strike level, > 0")->required();
    cmd_trans->add_flag("--oracle", trans.oracle,
                        "Also run the quadrature cross-check and report the relative gap");
    cmd_trans->add_option("--tolerance", trans.tolerance,
                          "Quadrature relative tolerance, in (0, 1e-4]")
        ->capture_default_str();

    EigenArgs eigen;
    auto* cmd_eigen = app.add_subcommand(
        "eigen", "Lowest eigenvalues of the pricing operator on a box (CSV to stdout)");
    cmd_eigen->add_option("--rate", eigen.rate, "Annualized interest rate, > 0")->required();
    cmd_eigen->add_option("--vol", eigen.vol, "Annualized volatility, > 0")->required();
    cmd_eigen->add_option("--support", eigen.support, "Lower wall (support level)")->required();
    cmd_eigen->add_option("--resistance", eigen.resistance, "Upper wall (resistance level)")
        ->required();
    cmd_eigen->add_option("--count", eigen.count, "Number of eigenvalues, >= 1")->required();
    cmd_eigen->add_option("--grid-points", eigen.grid_points, "Interior grid points, >= 3")
        ->capture_default_str();
    cmd_eigen->add_flag("--flat-potential", eigen.flat_potential,
                        "Replace the 1/S^2 potential with 0 (test mode)");
    cmd_eigen->add_option("--eigenfunctions", eigen.eigenfunctions_prefix,
                          "Write eigenfunctions to <prefix>.<n>.csv");

    PotentialArgs pot;
    auto* cmd_pot = app.add_subcommand(
        "potential", "Sample the price potential V(S) = 1/S^2 (CSV to stdout)");
    cmd_pot->add_option("--s-min", pot.s_min, "Lowest sampled price, > 0")->required();
    cmd_pot->add_option("--s-max", pot.s_max, "Highest sampled price, > s-min")->required();
    cmd_pot->add_option("--points", pot.points, "Sample count, >= 2")->capture_default_str();
    cmd_pot->add_option("--lambda-level", pot.lambda_levels,
                        "Level to annotate with its turning point (repeatable)");

    ScanArgs scan_args;
    auto* cmd_scan = app.add_subcommand(
        "scan", "Scan a CSV price series for tunneling breakouts (JSON report)");
    cmd_scan->add_option("--input", scan_args.input, "Input CSV file")->required();
    cmd_scan->add_option("--rate", scan_args.detector.rate, "Annualized interest rate, > 0")
        ->required();
    cmd_scan->add_option("--t-threshold", scan_args.detector.t_threshold,
                         "Transmission threshold for an event")
        ->capture_default_str();
    cmd_scan->add_option("--vol-drop-ratio", scan_args.detector.vol_drop_ratio,
                         "Fast/slow vol collapse ratio")
        ->capture_default_str();
    cmd_scan->add_option("--vol-fast", scan_args.detector.vol_fast_window,
                         "Fast realized-vol window (bars)")
        ->capture_default_str();
    cmd_scan->add_option("--vol-slow", scan_args.detector.vol_slow_window,
                         "Slow realized-vol window (bars)")
        ->capture_default_str();
    cmd_scan->add_option("--window", scan_args.regime.window, "Regime detection window (bars)")
        ->capture_default_str();
    cmd_scan->add_option("--band-fraction", scan_args.regime.band_fraction,
                         "Max (resistance - support) / midpoint for a qualifying window")
        ->capture_default_str();
    cmd_scan->add_option("--containment-min", scan_args.regime.containment_min,
                         "Min fraction of closes inside the walls")
        ->capture_default_str();
    cmd_scan->add_option("--min-length", scan_args.regime.min_length,
                         "Min regime length (bars)")
        ->capture_default_str();
    cmd_scan->add_option("--symbol", scan_args.symbol,
                         "Symbol in the report (default: input file stem)");
    cmd_scan->add_option("--output", scan_args.output, "Output file; stdout when omitted");

    SimulateArgs sim;
    auto* cmd_sim = app.add_subcommand(
        "simulate", "Generate a seeded range-bound path, optional breakout (CSV)");
    cmd_sim->add_option("--seed", sim.config.seed, "RNG seed")->required();
    cmd_sim->add_option("--bars", sim.config.bars, "Number of bars")->capture_default_str();
    cmd_sim->add_option("--start", sim.config.start, "Starting price")->capture_default_str();
    cmd_sim->add_option("--support", sim.config.support, "Lower reflecting wall")
        ->capture_default_str();
    cmd_sim->add_option("--resistance", sim.config.resistance, "Upper reflecting wall")
        ->capture_default_str();
    cmd_sim->add_option("--daily-vol", sim.config.daily_vol, "Per-bar return volatility")
        ->capture_default_str();
    cmd_sim->add_option("--breakout-at", sim.breakout_at,
                        "Bar index where the injected breakout starts");
    cmd_sim->add_option("--vol-damp", sim.vol_damp, "Volatility damp factor, in (0, 1)")
        ->capture_default_str();
    cmd_sim->add_option("--drift-per-bar", sim.drift_per_bar,
                        "Signed log-return drift after the breakout bar")
        ->capture_default_str();
    cmd_sim->add_option("--direction", sim.direction, "Breakout direction: up or down")
        ->capture_default_str();
    cmd_sim->add_option("--output", sim.output, "Output file; stdout when omitted");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cmd_trans->parsed()) return run_transmission(trans);
        if (cmd_eigen->parsed()) return run_eigen(eigen);
        if (cmd_pot->parsed()) return run_potential(pot);
        if (cmd_scan->parsed()) return run_scan(scan_args);
        if (cmd_sim->parsed()) return run_simulate(sim);
    } catch (const qtunnel::NumericError& e) {
        log_at(LogLevel::error, std::string(e.what()) +
                                    " (best estimate " + format_double(e.best_estimate()) +
                                    ", achieved error " + format_double(e.achieved_error()) + ")");
        return 3;
    } catch (const qtunnel::ParseError& e) {
        log_at(LogLevel::error, e.what());
        return 2;
    } catch (const std::out_of_range& e) {
        log_at(LogLevel::error, e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        log_at(LogLevel::error, e.what());
        return 1;
    } catch (const std::domain_error& e) {
        log_at(LogLevel::error, e.what());
        return 1;
    } catch (const std::exception& e) {
        log_at(LogLevel::error, e.what());
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_main(argc, argv);
    } catch (...) {
        std::fputs("qtunnel: fatal error\n", stderr);
        return 1;
    }
}
