#include <CLI11.hpp>

#include "degenfb/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"degenfb: a finite-difference laboratory for singularly perturbed doubly "
                 "degenerate elliptic free boundary problems"};

    std::string config_path;
    std::string out_dir;
    std::int64_t seed = -1;
    int threads = -1;

    app.add_option("--config", config_path, "JSON experiment configuration")->required();
    app.add_option("--out", out_dir, "output directory (overrides the config)");
    app.add_option("--seed", seed, "sampling seed (overrides the config)");
    app.add_option("--threads", threads, "worker threads; affects speed only, never results");

    CLI11_PARSE(app, argc, argv);

    std::optional<std::uint64_t> seed_opt;
    if (seed >= 0) seed_opt = static_cast<std::uint64_t>(seed);
    std::optional<int> threads_opt;
    if (threads >= 0) threads_opt = threads;

    return degenfb::run_config_file(config_path, out_dir, seed_opt, threads_opt);
}
