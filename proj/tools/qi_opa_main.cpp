#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "qiopa/qiopa.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPhysics = 2;
constexpr int kExitNumeric = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qiopa::ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

qiopa::SweepSpec load_spec(const std::string& config_path) {
    if (config_path.empty()) return qiopa::default_spec();
    return qiopa::parse_config(read_file(config_path));
}

void write_output(const std::string& out_path, const std::string& csv) {
    if (out_path.empty()) {
        std::cout << csv;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw qiopa::ConfigError("cannot open output file '" + out_path + "'");
    out << csv;
}

qiopa::ErrorModel parse_error_model(const std::string& name) {
    if (name == "as-printed") return qiopa::ErrorModel::AsPrinted;
    if (name == "sqrt-form") return qiopa::ErrorModel::SqrtForm;
    throw qiopa::ConfigError("unknown error model '" + name + "' (as-printed | sqrt-form)");
}

void run_spec_command(const std::string& config_path, const std::string& out_path,
                      const std::string& model_name, int jobs,
                      const std::vector<std::string>& forced_outputs) {
    qiopa::SweepSpec spec = load_spec(config_path);
    if (!forced_outputs.empty()) spec.outputs = forced_outputs;
    const qiopa::ErrorModel model = parse_error_model(model_name);
    const qiopa::SweepTable table = qiopa::run_sweep(spec, jobs, model);
    const bool stability_only =
        spec.outputs.size() == 1 && spec.outputs.front() == "stability";
    if (!stability_only && !qiopa::any_observable_populated(table))
        throw qiopa::PhysicsError("no grid point produced an observable (all points unstable "
                                  "or outside the physical domain)");
    write_output(out_path, qiopa::to_csv(table));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stationary quantum statistics of a two-cavity electro-optomechanical "
                 "converter with an intracavity OPA: stability maps, output entanglement, "
                 "and quantum-illumination detection datasets."};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string model_name = "as-printed";
    int jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;

    app.add_option("--config", config_path, "configuration file (key = value lines)");
    app.add_option("--out", out_path, "output CSV path (default: stdout)");
    app.add_option("--error-model", model_name, "as-printed | sqrt-form")
        ->check(CLI::IsMember({"as-printed", "sqrt-form"}));
    app.add_option("--jobs", jobs, "worker threads for grid evaluation")->check(CLI::PositiveNumber);

    auto* cmd_stability = app.add_subcommand("stability", "stability classification");
    auto* cmd_entangle = app.add_subcommand("entanglement", "output entanglement and photon numbers");
    auto* cmd_detect = app.add_subcommand("detect", "detection SNR, error probability, benchmark");
    auto* cmd_sweep = app.add_subcommand("sweep", "sweep with config-selected outputs");
    auto* cmd_figure = app.add_subcommand("figure", "emit a built-in figure dataset");
    std::string figure_name;
    cmd_figure->add_option("name", figure_name, "fig2, fig3a..fig3d, fig4a..fig4d, fig5a, fig5b, fig6a, fig6b")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (cmd_stability->parsed()) {
            run_spec_command(config_path, out_path, model_name, jobs, {"stability"});
        } else if (cmd_entangle->parsed()) {
            run_spec_command(config_path, out_path, model_name, jobs, {"E_N", "n(o|w)", "n(w|o)"});
        } else if (cmd_detect->parsed()) {
            run_spec_command(config_path, out_path, model_name, jobs,
                             {"SNR", "P", "SNR_coh", "P_coh"});
        } else if (cmd_sweep->parsed()) {
            run_spec_command(config_path, out_path, model_name, jobs, {});
        } else if (cmd_figure->parsed()) {
            const qiopa::SweepTable table =
                qiopa::figure_table(figure_name, jobs, parse_error_model(model_name));
            write_output(out_path, qiopa::to_csv(table));
        }
    } catch (const qiopa::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const qiopa::PhysicsError& e) {
        std::cerr << "physics error: " << e.what() << "\n";
        return kExitPhysics;
    } catch (const qiopa::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}
