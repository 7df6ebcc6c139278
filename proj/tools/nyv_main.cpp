// nyv - spectral laboratory for the perturbed multiplicative stochastic
// heat equation: noise sampling, averaged fields, Young-Volterra sewing and
// the Picard solver, driven by flat key=value configs.
//
// Usage:
//   nyv <command> [--config <file>] [--set key=value ...] [--out <dir>]
//   nyv feasibility --vartheta <v> --hurst <H> --kappa <k>
//
// Exit codes: 0 success, 2 configuration error, 3 numerical divergence /
// failed verification, 4 I/O error.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nyv/errors.hpp"
#include "nyv/harness.hpp"

namespace {

int run_feasibility(double vartheta, double hurst, double kappa) {
    const nyv::FeasibilityVerdict v = nyv::feasibility_report(vartheta, hurst, kappa);
    std::printf("threshold: kappa > %.17g\n", v.threshold);
    std::printf("kappa_in:  %.17g -> %s\n", kappa, v.admissible ? "admissible" : "not admissible");
    std::printf("regime:    %s\n", v.regime.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nyv - pathwise mSHE laboratory"};
    app.require_subcommand(1);

    const std::vector<std::string> commands = {"simulate", "regularity",  "tails",
                                               "convergence", "stability", "verify-ops"};
    std::string config_file;
    std::vector<std::string> overrides;
    std::string out_dir = "nyv_out";
    for (const auto& name : commands) {
        CLI::App* sub = app.add_subcommand(name, name + " experiment");
        sub->add_option("--config", config_file, "flat key=value config file");
        sub->add_option("--set", overrides, "override, key=value")->take_all();
        sub->add_option("--out", out_dir, "output directory");
    }

    double fz_vartheta = 0.5, fz_hurst = 0.25, fz_kappa = 3.0;
    CLI::App* feas = app.add_subcommand("feasibility", "regime thresholds for (vartheta, H, kappa)");
    feas->add_option("--vartheta", fz_vartheta, "noise regularity exponent")->required();
    feas->add_option("--hurst", fz_hurst, "Hurst parameter")->required();
    feas->add_option("--kappa", fz_kappa, "spatial regularity of g")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (feas->parsed()) return run_feasibility(fz_vartheta, fz_hurst, fz_kappa);

        nyv::ExperimentConfig cfg;
        if (!config_file.empty()) cfg = nyv::ExperimentConfig::parse_file(config_file);
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw nyv::config_error("--set expects key=value, got '" + kv + "'");
            cfg.apply_override(kv.substr(0, eq), kv.substr(eq + 1));
        }
        // the CLI subcommand decides the command; a manifest's own command
        // key is informational and overridden here
        cfg.command = app.get_subcommands().front()->get_name();
        return nyv::run(cfg, out_dir);
    } catch (const nyv::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nyv::numeric_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const nyv::io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
