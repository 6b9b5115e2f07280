#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "chemotax/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"chemotax: attraction-repulsion chemotaxis simulator and regime toolkit"};
    app.require_subcommand(1);

    // run
    std::string run_config;
    CLI::App* run = app.add_subcommand("run", "simulate one configuration");
    run->add_option("config", run_config, "config file")->required();

    // classify
    chemotax::cli::ClassifyParams classify;
    CLI::App* cls = app.add_subcommand("classify", "evaluate the boundedness criteria");
    cls->add_option("--variant", classify.variant, "local|nonlocal");
    cls->add_option("--tau", classify.tau, "0 or 1");
    cls->add_option("--m1", classify.m1)->required();
    cls->add_option("--m2", classify.m2)->required();
    cls->add_option("--m3", classify.m3)->required();
    cls->add_option("--k", classify.k)->required();
    cls->add_option("--l", classify.l)->required();
    cls->add_option("--r", classify.r)->required();
    cls->add_option("--n", classify.n)->required();

    // exponents
    chemotax::cli::ExponentsParams exponents;
    CLI::App* exp = app.add_subcommand("exponents", "interpolation exponents and p-bar");
    exp->add_option("--m1", exponents.m1)->required();
    exp->add_option("--m2", exponents.m2)->required();
    exp->add_option("--m3", exponents.m3)->required();
    exp->add_option("--k", exponents.k)->required();
    exp->add_option("--l", exponents.l)->required();
    exp->add_option("--n", exponents.n)->required();
    exp->add_option("--p", exponents.p, "Lebesgue index (omit with --find-pbar)");
    exp->add_option("--q", exponents.q, "auxiliary index, default max{l, m3+l-1}+1");
    exp->add_flag("--find-pbar", exponents.find_pbar, "scan for the exponent threshold");
    exp->add_option("--require", exponents.require,
                    "comma list of relations to demand (default: all)");

    // sweep
    std::string sweep_config;
    int jobs = 0;
    CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep from a [sweep] config");
    sweep->add_option("config", sweep_config, "config file")->required();
    sweep->add_option("--jobs", jobs, "worker count (CHEMO_JOBS overrides)");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        return chemotax::cli::cmd_run(run_config, std::cout, std::cerr);
    }
    if (cls->parsed()) {
        return chemotax::cli::cmd_classify(classify, std::cout, std::cerr);
    }
    if (exp->parsed()) {
        return chemotax::cli::cmd_exponents(exponents, std::cout, std::cerr);
    }
    if (sweep->parsed()) {
        return chemotax::cli::cmd_sweep(sweep_config, jobs, std::cout, std::cerr);
    }
    return chemotax::cli::exit_error;
}
