#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rmtherm/experiments.hpp"

namespace {

using namespace rmtherm;

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<unsigned> threads;
    std::optional<std::string> format;
};

void add_common(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config, "experiment config (JSON); defaults apply when omitted");
    sub->add_option("--seed", o.seed, "master seed (u64)");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--threads", o.threads, "worker threads; 0 = all cores");
    sub->add_option("--format", o.format, "table format")->check(CLI::IsMember({"csv", "json"}));
}

ExperimentConfig resolve(const Overrides& o) {
    ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
    if (o.seed) c.ensemble.master_seed = *o.seed;
    if (o.out) c.output.directory = *o.out;
    if (o.threads) c.threads = *o.threads;
    if (o.format) c.output.format = *o.format;
    c.validate();
    return c;
}

int finish(const experiments::ComparisonReport& r) {
    std::cout << r.operation << ": " << (r.passed() ? "PASS" : "FAIL") << "\n";
    for (const auto& g : r.gates)
        std::cout << "  gate " << g.name << ": " << (g.passed ? "pass" : "fail") << " " << g.detail.dump() << "\n";
    if (!r.rows.empty())
        std::cout << "  max |z| " << r.max_z << ", pass fraction " << r.pass_fraction << " over " << r.rows.size()
                  << " points\n";
    if (r.variance_slope) std::cout << "  variance slope " << *r.variance_slope << "\n";
    for (const auto& f : r.files) std::cout << "  wrote " << f.string() << "\n";
    return r.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random-matrix thermalization experiments"};
    app.require_subcommand(1);

    Overrides o;
    std::uint64_t realization = 0;
    auto* sample = app.add_subcommand("sample", "eigenvalue histogram against the semicircle");
    auto* trajectory = app.add_subcommand("trajectory", "Tr(A rho(t)) and f(t) for one realization");
    trajectory->add_option("--realization", realization, "realization index");
    auto* sweep = app.add_subcommand("sweep", "ensemble statistics and comparison with the predicted mean");
    auto* moments = app.add_subcommand("moments", "moment estimators against their predictions");
    auto* oracle = app.add_subcommand("oracle", "analytic curves");
    auto* eth = app.add_subcommand("compare-eth", "c_rm against c_eth");
    for (auto* s : {sample, trajectory, sweep, moments, oracle, eth}) add_common(s, o);

    CLI11_PARSE(app, argc, argv);

    try {
        const auto c = resolve(o);
        if (sample->parsed()) return finish(experiments::sample_spectrum(c));
        if (trajectory->parsed()) return finish(experiments::single_trajectory(c, realization));
        if (sweep->parsed()) return finish(experiments::run_sweep(c));
        if (moments->parsed()) return finish(experiments::run_moment_suite(c));
        if (oracle->parsed()) return finish(experiments::emit_oracle_curves(c));
        if (eth->parsed()) return finish(experiments::compare_eth(c));
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const io::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
