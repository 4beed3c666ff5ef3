// ugi: evaluate unitary-group integrals and check them against Monte Carlo and character series.
//
//   ugi eval   <i1|i2|i2rect|i3> --a A.json --b B.json [--c C.json --d D.json] [--nu K]
//   ugi oracle <mc|series> <kind> (matrix flags | --random --n N [--m M]) [--nu K] [--eta L]
//              [--samples S] [--max-weight L] [--seed X]
//   ugi verify <kind> (matrix flags | --random --n N [--m M]) [--nu K] [--samples S]
//              [--max-weight L] [--seed X]
//
// Exit codes: 0 ok, 1 usage, 2 malformed or mismatched input, 3 numerical failure.

#include <iostream>

#include <CLI11.hpp>

#include "ugi/cli.hpp"

namespace {

void add_common(CLI::App* cmd, ugi::cli::Options& o, bool random_ok) {
    cmd->add_option("--a", o.a, "matrix file for A");
    cmd->add_option("--b", o.b, "matrix file for B");
    cmd->add_option("--c", o.c, "matrix file for C");
    cmd->add_option("--d", o.d, "matrix file for D");
    cmd->add_option("--nu", o.nu, "power of det U (and det V for i2)");
    cmd->add_option("--out", o.out, "also write the record to this path");
    if (random_ok) {
        cmd->add_flag("--random", o.random, "draw the matrices from --seed instead of files");
        cmd->add_option("--n", o.n, "matrix size N for --random");
        cmd->add_option("--m", o.m, "second size M < N for --random i2rect");
    }
}

void add_sampling(CLI::App* cmd, ugi::cli::Options& o) {
    cmd->add_option("--samples", o.samples, "Monte Carlo sample count");
    cmd->add_option("--max-weight", o.max_weight, "character-series cutoff on partition weight");
    cmd->add_option("--seed", o.seed, "64-bit seed (default $UGI_SEED or 0)");
    cmd->add_option("--threads", o.threads, "Monte Carlo worker threads (0 = all cores)");
}

} // namespace

int main(int argc, char** argv) {
    using namespace ugi::cli;
    Options o;
    try {
        o.seed = default_seed();
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    }

    CLI::App app{"Unitary-group integrals over general complex matrices"};
    app.require_subcommand(1);

    auto* eval = app.add_subcommand("eval", "closed-form value");
    eval->add_option("kind", o.kind, "i1, i2, i2rect or i3")->required();
    add_common(eval, o, false);

    auto* oracle = app.add_subcommand("oracle", "Monte Carlo or character-series estimate");
    oracle->add_option("mode", o.mode, "mc or series")->required();
    oracle->add_option("kind", o.kind, "i1, i2, i2rect or i3")->required();
    add_common(oracle, o, true);
    oracle->add_option("--eta", o.eta, "power of det V (oracle mc i2rect only)");
    add_sampling(oracle, o);

    auto* verify = app.add_subcommand("verify", "closed form vs series vs Monte Carlo");
    verify->add_option("kind", o.kind, "i1, i2, i2rect or i3")->required();
    add_common(verify, o, true);
    add_sampling(verify, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    if (eval->parsed()) return run_and_report(run_eval, o, std::cout, std::cerr);
    if (oracle->parsed()) return run_and_report(run_oracle, o, std::cout, std::cerr);
    return run_and_report(run_verify, o, std::cout, std::cerr);
}
