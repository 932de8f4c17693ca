// SPDX-License-Identifier: Apache-2.0
//
// surfhead: mesh-driven affine rigging of 2D Gaussian surfels.
//
//   surfhead deform      --config cfg.json [--out dir] [--seed n] [--threads n]
//   surfhead render      --config cfg.json [--out dir] [--seed n] [--threads n]
//   surfhead interp-demo [--out dir] [--threads n]
//   surfhead fit         --config cfg.json [--out dir] [--seed n] [--threads n]
//   surfhead selftest    [--threads n]
//
// SURFHEAD_THREADS overrides --threads.

#include <CLI11.hpp>

#include <cstdlib>
#include <string>

#include "surfhead/commands.hpp"

namespace {

int thread_count(int cli_threads)
{
    if (const char* env = std::getenv("SURFHEAD_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (const std::exception&) {
        }
    }
    return cli_threads;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"mesh-driven affine rigging of 2D Gaussian surfels"};
    app.require_subcommand(1);

    surfhead::CommandOptions opt;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string mutate;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config) {
            sub->add_option("--config", opt.config_path, "run configuration JSON")->required();
        }
        sub->add_option("--out", out_dir, "output directory override");
        sub->add_option("--seed", seed, "seed override");
        sub->add_option("--threads", threads, "worker thread count")->check(CLI::PositiveNumber);
    };

    CLI::App* deform = app.add_subcommand("deform", "deform a surfel set onto a posed mesh");
    add_common(deform, true);
    CLI::App* render = app.add_subcommand("render", "render a (possibly deformed) surfel set");
    add_common(render, true);
    CLI::App* interp = app.add_subcommand("interp-demo",
                                          "blend-interpolation tables and hinge comparison");
    add_common(interp, false);
    CLI::App* fit = app.add_subcommand("fit", "fit surfel parameters against a target image");
    add_common(fit, true);
    CLI::App* selftest = app.add_subcommand("selftest", "run the full property suite");
    selftest->add_option("--threads", threads, "worker thread count")->check(CLI::PositiveNumber);
    selftest->add_option("--mutate", mutate, "fault-injection hook for suite validation")
        ->group(""); // hidden

    CLI11_PARSE(app, argc, argv);

    opt.threads = thread_count(threads);
    for (CLI::App* sub : {deform, render, interp, fit}) {
        if (sub->parsed()) {
            if (sub->count("--out") > 0) opt.out_dir = out_dir;
            if (sub->count("--seed") > 0) opt.seed = seed;
        }
    }

    if (deform->parsed()) return surfhead::cmd_deform(opt);
    if (render->parsed()) return surfhead::cmd_render(opt);
    if (interp->parsed()) return surfhead::cmd_interp_demo(opt);
    if (fit->parsed()) return surfhead::cmd_fit(opt);
    return surfhead::cmd_selftest(opt.threads, mutate);
}
