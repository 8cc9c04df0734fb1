#include <CLI11.hpp>
#include <iostream>

#include "hbem/driver.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Adaptive Galerkin BEM for transmission problems with hyperbolic metamaterials"};
    app.set_version_flag("--version", hbem::version);
    app.require_subcommand(1);

    std::string config_path;
    int levels = -1;
    std::string out_dir;
    hbem::RunOptions opt;
    auto* run = app.add_subcommand("run", "Run the adaptive solver on a problem file");
    run->add_option("config", config_path, "Problem configuration file")->required();
    run->add_flag("--serial", opt.serial, "Single thread, byte-identical outputs");
    run->add_option("--levels", levels, "Override the number of refinement levels")->check(CLI::NonNegativeNumber);
    run->add_option("--out", out_dir, "Override the output directory");
    bool no_field = false;
    bool no_reference = false;
    run->add_flag("--no-field", no_field, "Skip the field grid");
    run->add_flag("--no-reference", no_reference, "Skip the reference solve and error columns");

    std::string examples_dir;
    auto* emit = app.add_subcommand("emit-examples", "Write the example problem files ex1.cfg ... ex5.cfg");
    emit->add_option("dir", examples_dir, "Target directory")->required();

    CLI11_PARSE(app, argc, argv);

    if (*run) {
        if (levels >= 0) opt.levels = levels;
        if (!out_dir.empty()) opt.out = out_dir;
        opt.field = !no_field;
        opt.reference = !no_reference;
        return hbem::run_config_file(config_path, opt, std::cout, std::cerr);
    }
    try {
        for (const auto& p : hbem::write_example_configs(examples_dir)) std::cout << p.string() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
