#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "commands.hpp"
#include "hawkes/errors.hpp"

namespace {

std::filesystem::path env_dir() {
    const char* v = std::getenv("HAWKES_OUT_DIR");
    return v && *v ? std::filesystem::path(v) : std::filesystem::path("out");
}

unsigned env_jobs() {
    const char* v = std::getenv("HAWKES_JOBS");
    if (!v || !*v) return 1;
    try {
        const long n = std::stol(v);
        if (n < 1) throw hawkes::ConfigError("HAWKES_JOBS must be >= 1");
        return static_cast<unsigned>(n);
    } catch (const std::logic_error&) {
        throw hawkes::ConfigError(std::string("HAWKES_JOBS is not a number: ") + v);
    }
}

}  // namespace

int main(int argc, char** argv) {
    using namespace hawkes::cli;
    try {
        CLI::App app{"Multivariate Hawkes simulation and Bayesian inference with step-function kernels"};
        app.require_subcommand(1);

        SimulateOptions sim;
        sim.out = env_dir();
        sim.jobs = env_jobs();
        std::string sim_seed;
        auto* s = app.add_subcommand("simulate", "simulate replicate data sets for a scenario");
        s->add_option("--out,-o", sim.out, "experiment directory (env HAWKES_OUT_DIR)");
        s->add_option("--config,-c", sim.config, "experiment TOML");
        s->add_option("--scenario", sim.scenario, "frozen scenario 1, 2 or 3");
        s->add_option("--model", sim.model, "custom model JSON");
        s->add_option("--seed", sim.seed, "top-level seed");
        s->add_option("--replicates", sim.replicates, "number of data sets");
        s->add_flag("--quick", sim.quick, "T=5, 5 replicates, 6000 iterations");
        s->add_option("--jobs,-j", sim.jobs, "worker threads (env HAWKES_JOBS)")->check(CLI::PositiveNumber);

        InferOptions inf;
        inf.dir = env_dir();
        inf.jobs = env_jobs();
        auto* i = app.add_subcommand("infer", "run the sampler on every replicate and horizon");
        i->add_option("--dir,-d", inf.dir, "experiment directory (env HAWKES_OUT_DIR)");
        i->add_option("--config,-c", inf.config, "TOML whose [prior] and [sampler] override the stored config");
        i->add_flag("--quick", inf.quick, "T=5, at most 5 replicates, 6000 iterations");
        i->add_flag("--dry-run", inf.dry_run, "print the effective config and plan, do not sample");
        i->add_flag("--resume", inf.resume, "skip finished chains and continue from checkpoints");
        i->add_option("--jobs,-j", inf.jobs, "worker threads (env HAWKES_JOBS)")->check(CLI::PositiveNumber);

        ReportOptions rep;
        rep.dir = env_dir();
        rep.jobs = env_jobs();
        auto* r = app.add_subcommand("report", "D metrics, delta table, bands and graphs");
        r->add_option("--dir,-d", rep.dir, "experiment directory (env HAWKES_OUT_DIR)");
        r->add_option("--max-draws", rep.max_draws, "draws per replicate used for D metrics")->check(CLI::PositiveNumber);
        r->add_option("--threshold", rep.threshold, "edge threshold for graphs")->check(CLI::Range(0.0, 1.0));
        r->add_option("--jobs,-j", rep.jobs, "worker threads (env HAWKES_JOBS)")->check(CLI::PositiveNumber);

        DistanceOptions dist;
        auto* d = app.add_subcommand("distance", "L1 parameter distance and d_1T between two models");
        d->add_option("model_a", dist.model_a, "model JSON")->required();
        d->add_option("model_b", dist.model_b, "model JSON")->required();
        d->add_option("--events", dist.events, "event CSV for d_1T");
        d->add_option("--horizon", dist.horizon, "T for d_1T");

        CheckModelOptions chk;
        auto* c = app.add_subcommand("check-model", "branching matrix, stationarity and mean intensity");
        c->add_option("--model", chk.model, "model JSON");
        c->add_option("--scenario", chk.scenario, "frozen scenario 1, 2 or 3");
        c->add_flag("--strict", chk.strict, "exit 3 when the model is not stationary");

        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e);
            return code == 0 ? kExitOk : kExitConfig;
        }

        if (s->parsed()) return cmd_simulate(sim, std::cout, std::cerr);
        if (i->parsed()) return cmd_infer(inf, std::cout, std::cerr);
        if (r->parsed()) return cmd_report(rep, std::cout, std::cerr);
        if (d->parsed()) return cmd_distance(dist, std::cout);
        if (c->parsed()) return cmd_check_model(chk, std::cout);
        return kExitConfig;
    } catch (const hawkes::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const hawkes::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
