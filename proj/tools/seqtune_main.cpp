#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "seqtune/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"seqtune: random search and sequential random search for hyperparameter tuning"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int jobs = 1;
    std::string algorithm = "rs";

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment JSON config")->required();
        cmd->add_option("--out", out_dir, "output directory (overrides config)");
        cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    };

    auto* dist = app.add_subcommand("diststudy", "fit distribution families to bootstrap losses");
    add_common(dist);

    auto* tune = app.add_subcommand("tune", "run one tuning algorithm");
    add_common(tune);
    tune->add_option("--algorithm", algorithm, "rs or sqrs")
        ->check(CLI::IsMember({"rs", "sqrs"}));

    auto* compare = app.add_subcommand("compare", "paired random-search vs sqrs benchmark");
    add_common(compare);

    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = seqtune::load_experiment_config(config_path);
        if (app.got_subcommand(dist)) return seqtune::cmd_diststudy(cfg, out_dir, jobs);
        if (app.got_subcommand(tune)) return seqtune::cmd_tune(cfg, algorithm, out_dir, jobs);
        return seqtune::cmd_compare(cfg, out_dir, jobs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
