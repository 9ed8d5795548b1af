#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ppcauchy/app.hpp"

int main(int argc, char** argv) {
    using ppcauchy::cli::Command;

    CLI::App app{"Cauchy problem for a fifth-order pseudoparabolic equation with data on a decreasing curve"};
    app.require_subcommand(1);

    std::string config;
    std::string out = "out";
    std::size_t nx = 0;
    std::size_t ny = 0;
    bool quiet = false;
    bool full_jet = false;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory")->capture_default_str();
        sub->add_option("--grid-nx", nx, "override grid.nx (cells along x)");
        sub->add_option("--grid-ny", ny, "override grid.ny (cells along y)");
        sub->add_flag("--quiet", quiet, "suppress progress messages");
    };

    std::optional<Command> command;
    auto* transform = app.add_subcommand("transform", "convert between the two Cauchy data bundles");
    transform->require_subcommand(1);
    auto* to_cl = transform->add_subcommand("to-classical", "non-classical data to classical traces");
    auto* to_nc = transform->add_subcommand("to-nonclassical", "classical traces to non-classical data");
    auto* check = app.add_subcommand("check-agreement", "refinement diagnostic for the agreement conditions");
    auto* solve = app.add_subcommand("solve", "solve the non-classical problem by Picard iteration");
    auto* mms = app.add_subcommand("mms", "manufactured-solution run on the configured grid");
    auto* conv = app.add_subcommand("convergence", "grid-convergence study over convergence.sizes");
    auto* norm = app.add_subcommand("norm", "product-space norm of a non-classical bundle");
    for (auto* sub : {to_cl, to_nc, check, solve, mms, conv, norm}) common(sub);
    for (auto* sub : {solve, mms}) sub->add_flag("--full-jet", full_jet, "write all twelve jet fields");

    to_cl->callback([&] { command = Command::ToClassical; });
    to_nc->callback([&] { command = Command::ToNonClassical; });
    check->callback([&] { command = Command::CheckAgreement; });
    solve->callback([&] { command = Command::Solve; });
    mms->callback([&] { command = Command::Mms; });
    conv->callback([&] { command = Command::Convergence; });
    norm->callback([&] { command = Command::Norm; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ppcauchy::cli::kInputError;
    }

    ppcauchy::cli::RunOptions opts;
    if (nx > 0) opts.grid_nx = nx;
    if (ny > 0) opts.grid_ny = ny;
    opts.quiet = quiet;
    opts.full_jet = full_jet;
    return ppcauchy::cli::run(*command, config, out, opts);
}
