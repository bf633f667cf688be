#include "commands.hpp"

#include "magsi/cgo.hpp"
#include "magsi/forward.hpp"
#include "magsi/io.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace magsi;
using namespace magsi::cli;

int main(int argc, char** argv) {
    CLI::App app{"Boundary-data experiments for nonlinear magnetic Schroedinger equations"};
    app.require_subcommand(1);
    GlobalOptions g;
    const auto add_globals = [&g](CLI::App* sub) {
        sub->add_option("--config", g.config_path, "INI configuration file");
        sub->add_option("--out", g.out_dir, "Output directory")->capture_default_str();
        sub->add_option("--seed", g.seed, "Seed for randomized stages (none are randomized by default)");
        sub->add_flag("--no-timestamp", g.no_timestamp, "Omit the timestamp from reports");
    };
    add_globals(&app);

    ForwardArgs fa;
    auto* forward = app.add_subcommand("forward", "Solve the nonlinear Dirichlet problem");
    add_globals(forward);
    forward->add_option("--f", fa.f_csv, "Dirichlet data (boundary CSV); default from [data]");
    forward->add_option("--u", fa.u_csv, "Solution field CSV (default <out>/u.csv)");
    forward->add_option("--report", fa.report, "Report JSON (default <out>/report.json)");

    DtnArgs da;
    auto* dtn = app.add_subcommand("dtn", "Evaluate the full or partial DtN map");
    add_globals(dtn);
    dtn->add_option("--f", da.f_csv, "Dirichlet data (boundary CSV); default from [data]");
    dtn->add_flag("--partial", da.partial, "Restrict the data to gamma1 and the output to gamma2");
    dtn->add_option("--lambda", da.lambda_csv, "Output boundary CSV (default <out>/lambda.csv)");
    dtn->add_option("--report", da.report, "Report JSON (default <out>/dtn.json)");

    LinearizeArgs la;
    auto* lin = app.add_subcommand("linearize", "Mixed-eps stencil against the direct source solve");
    add_globals(lin);
    lin->add_option("--order", la.order, "Linearization order m (default [linearization] m)");
    lin->add_flag("--sweep", la.sweep, "Repeat over eps * {4, 2, 1, 1/2} and fit the slope");
    lin->add_option("--report", la.report, "Report JSON (default <out>/linearize.json)");

    IdentityArgs ia;
    auto* ident = app.add_subcommand("verify-identity", "Interior integral against boundary data");
    add_globals(ident);
    ident->add_option("--order", ia.order, "Order m (default [linearization] m)");
    ident->add_option("--threshold", ia.threshold, "Largest admissible relative gap");
    ident->add_option("--report", ia.report, "Report JSON (default <out>/identity.json)");

    DecayArgs ca;
    auto* decay = app.add_subcommand("cgo-decay", "Decay of the corrector of a corrected exponential");
    add_globals(decay);
    decay->set_help_flag("--help", "Print this help message and exit");
    decay->add_option("--zeta-kind", ca.zeta_kind, "Isotropic direction kind (default [cgo] zeta_kind)");
    decay->add_option("--h", ca.h_list, "Comma-separated semiclassical parameters")->delimiter(',');
    decay->add_option("--c", ca.c, "Cutoff width c");
    decay->add_option("--csv", ca.csv, "Decay table (default <out>/decay.csv)");
    decay->add_option("--report", ca.report, "Report JSON (default <out>/decay.json)");

    ReconstructArgs ra;
    auto* recon = app.add_subcommand("reconstruct", "Recover the order-m coefficients from DtN data");
    add_globals(recon);
    recon->add_option("--order", ra.order, "Order m (default [linearization] m)");
    recon->add_option("--K", ra.K, "Frequency cutoff (default [reconstruction] K)");
    recon->add_option("--out-a", ra.a_csv, "Recovered A (default <out>/A_rec.csv)");
    recon->add_option("--out-q", ra.q_csv, "Recovered q (default <out>/q_rec.csv)");
    recon->add_option("--report", ra.report, "Report JSON (default <out>/recon.json)");
    recon->add_option("--max-error", ra.max_error, "Exit 4 when a relative L2 error exceeds this");

    auto* self = app.add_subcommand("selftest", "Run the trivial-tier checks");
    add_globals(self);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        const RunConfig cfg = g.config_path.empty() ? default_run_config() : load_run_config(g.config_path);
        if (self->parsed()) return run_selftest();
        if (forward->parsed()) return run_forward(cfg, g, fa);
        if (dtn->parsed()) return run_dtn(cfg, g, da);
        if (lin->parsed()) return run_linearize(cfg, g, la);
        if (ident->parsed()) return run_verify_identity(cfg, g, ia);
        if (decay->parsed()) return run_cgo_decay(cfg, g, ca);
        if (recon->parsed()) return run_reconstruct(cfg, g, ra);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kConfigError;
    } catch (const NonConvergenceError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kSolverFailure;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kSolverFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return kSolverFailure;
    }
    return kConfigError;
}
