// scatent: batch front end for two-particle scattering entanglement runs.
//
//   scatent run        --config cfg.json [--out path] [--format csv|json] [--grid-n N] [--window W]
//   scatent check      --config cfg.json ...
//   scatent amplitudes --config cfg.json ...
//
// Exit codes: 0 success, 2 config error, 3 numeric or precondition error
// (including a failed check).

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "scatent/errors.hpp"
#include "scatent/experiment.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericError = 3;

struct Overrides {
    std::string config_path;
    std::string out_path;
    std::string format;
    std::optional<std::size_t> grid_n;
    std::optional<double> window;
};

void add_common_options(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("--config", o.config_path, "Experiment config (JSON)")->required();
    cmd->add_option("--out", o.out_path, "Output file; stdout if omitted");
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--grid-n", o.grid_n, "Grid nodes per axis");
    cmd->add_option("--window", o.window, "Grid half-width in packet widths");
}

scatent::ExperimentConfig resolve(const Overrides& o)
{
    scatent::ExperimentConfig c = scatent::load_config(o.config_path);
    if (!o.out_path.empty()) c.output_path = o.out_path;
    if (o.format == "csv") c.format = scatent::OutputFormat::csv;
    if (o.format == "json") c.format = scatent::OutputFormat::json;
    if (o.grid_n) c.grid_n = *o.grid_n;
    if (o.window) c.window = *o.window;
    scatent::validate(c);
    return c;
}

void emit(const scatent::ExperimentConfig& c, const std::string& text)
{
    if (c.output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(c.output_path, std::ios::binary);
    if (!out) {
        throw scatent::ConfigError("cannot write output file '" + c.output_path + "'");
    }
    out << text;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Entanglement from two-particle scattering in one dimension"};
    app.require_subcommand(1);

    Overrides o;
    auto* run = app.add_subcommand("run", "Compute purities at one point or over a scan");
    auto* check = app.add_subcommand("check", "Run the invariant suite at the configured point");
    auto* amps = app.add_subcommand("amplitudes", "Tabulate t(q) and r(q)");
    for (auto* cmd : {run, check, amps}) {
        add_common_options(cmd, o);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        const scatent::ExperimentConfig c = resolve(o);
        if (run->parsed()) {
            emit(c, scatent::format_results(scatent::run(c), c.format));
            return 0;
        }
        if (check->parsed()) {
            const auto results = scatent::check(c);
            emit(c, scatent::format_checks(results, c.format));
            const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
            return ok ? 0 : kNumericError;
        }
        emit(c, scatent::format_amplitudes(scatent::amplitude_table(c), c.format));
        return 0;
    } catch (const scatent::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const scatent::InvalidParameter& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const scatent::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumericError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumericError;
    }
}
