// SPDX-License-Identifier: Apache-2.0
//
// camimo command line: seeded Monte Carlo sweeps with CSV/JSON output, a
// finite-difference self-check, and a version stamp.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "camimo/camimo.hpp"

namespace {

using namespace camimo;

int cmd_check_derivatives(int trials) {
    double h1_max = 0.0, h2_max = 0.0, c1_max = 0.0, c2_max = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        SystemConfig cfg;
        cfg.num_tx = cfg.num_rx = 4;
        cfg.aperture_tx = cfg.aperture_rx = 8.0;
        Rng rng(derive_seed(1000 + trial, 0, 0));
        const ChannelRealization real = sample_realization(cfg, rng);
        const AntennaLayout lay = random_feasible_layout(cfg, rng);
        const MatC H = effective_channel(real, lay, true);
        const PowerAllocation pa = optimal_allocation(H, cfg.power_budget, cfg.noise_power);
        auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-12); };
        for (int m = 0; m < cfg.num_tx; ++m) {
            const DerivativePair d =
                tx_objective_derivatives(lay, real, pa.Q, cfg.noise_power, m, true);
            auto f = [&](double x) {
                AntennaLayout l2 = lay;
                l2.tx[m] = x;
                return tx_objective(l2, real, pa.Q, cfg.noise_power, true);
            };
            const double x = lay.tx[m], e1 = 1e-5, e2 = 1e-4;
            h1_max = std::max(h1_max, rel(d.first, (f(x + e1) - f(x - e1)) / (2 * e1)));
            h2_max = std::max(h2_max, rel(d.second, (f(x + e2) - 2 * f(x) + f(x - e2)) / (e2 * e2)));
        }
        for (int n = 0; n < cfg.num_rx; ++n) {
            const DerivativePair d =
                rx_objective_derivatives(lay, real, pa.Sbar, cfg.noise_power, n, true);
            auto f = [&](double x) {
                AntennaLayout l2 = lay;
                l2.rx[n] = x;
                return rx_objective(l2, real, pa.Sbar, cfg.noise_power, true);
            };
            const double x = lay.rx[n], e1 = 1e-5, e2 = 1e-4;
            h1_max = std::max(h1_max, rel(d.first, (f(x + e1) - f(x - e1)) / (2 * e1)));
            h2_max = std::max(h2_max, rel(d.second, (f(x + e2) - 2 * f(x) + f(x - e2)) / (e2 * e2)));
        }
        // coupling square-root derivatives along coordinate 0
        const CouplingDecomposition dec = decompose(mc_matrix(lay.tx));
        const MatR dC = mc_matrix_derivative(lay.tx, 0, 1);
        const MatR X1 = inv_sqrt_derivative(dec, dC);
        const double e1 = 1e-5;
        VecR tp = lay.tx, tm = lay.tx;
        tp[0] += e1;
        tm[0] -= e1;
        const MatR fd1 =
            (decompose(mc_matrix(tp)).inv_sqrt - decompose(mc_matrix(tm)).inv_sqrt) / (2 * e1);
        c1_max = std::max(c1_max, (X1 - fd1).norm() / std::max(fd1.norm(), 1e-12));
        const MatR S1 = sqrt_derivative(dec, dC);
        const MatR X2 = inv_sqrt_second_derivative(dec, dC, mc_matrix_derivative(lay.tx, 0, 2),
                                                   X1, S1);
        const double e2 = 1e-4;
        tp = lay.tx;
        tm = lay.tx;
        tp[0] += e2;
        tm[0] -= e2;
        const MatR fd2 = (decompose(mc_matrix(tp)).inv_sqrt - 2.0 * dec.inv_sqrt +
                          decompose(mc_matrix(tm)).inv_sqrt) /
                         (e2 * e2);
        c2_max = std::max(c2_max, (X2 - fd2).norm() / std::max(fd2.norm(), 1e-12));
    }
    std::printf("objective h' max rel err   %.3e  (tol 1e-5)\n", h1_max);
    std::printf("objective h'' max rel err  %.3e  (tol 1e-3)\n", h2_max);
    std::printf("inv-sqrt d1 max rel err    %.3e  (tol 1e-5)\n", c1_max);
    std::printf("inv-sqrt d2 max rel err    %.3e  (tol 1e-4)\n", c2_max);
    const bool ok = h1_max < 1e-5 && h2_max < 1e-3 && c1_max < 1e-5 && c2_max < 1e-4;
    std::printf("%s\n", ok ? "OK" : "FAILED");
    return ok ? 0 : 1;
}

std::vector<Scheme> parse_schemes(const std::string &arg) {
    std::vector<Scheme> out;
    std::string tok;
    std::istringstream is(arg);
    while (std::getline(is, tok, ',')) {
        if (tok == "c-ma") out.push_back(Scheme::CMa);
        else if (tok == "nc-ma") out.push_back(Scheme::NcMa);
        else if (tok == "ula") out.push_back(Scheme::Ula);
        else if (tok == "cla") out.push_back(Scheme::Cla);
        else throw ConfigError("unknown scheme \"" + tok + "\" (use c-ma,nc-ma,ula,cla)");
    }
    if (out.empty()) throw ConfigError("no schemes given");
    return out;
}

void write_file(const std::filesystem::path &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

int cmd_run(const std::string &config_path, long long seed, bool seed_set, int realizations,
            const std::string &out_dir, const std::string &schemes_arg, const std::string &sweep,
            const std::vector<double> &values, int workers, bool trace) {
    ExperimentSpec spec;
    spec.base = load_config_file(config_path);
    spec.seed = seed_set ? static_cast<std::uint64_t>(seed) : spec.base.rng_seed;
    spec.num_realizations = realizations;
    spec.schemes = parse_schemes(schemes_arg);
    spec.workers = workers;
    spec.emit_traces = trace;
    if (sweep == "none") {
        spec.axis = SweepAxis::None;
        spec.values = {0.0};
        if (!values.empty()) throw ConfigError("--values requires --sweep antennas|snr");
    } else if (sweep == "antennas") {
        spec.axis = SweepAxis::NumAntennas;
        spec.values = values;
    } else if (sweep == "snr") {
        spec.axis = SweepAxis::SnrDb;
        spec.values = values;
    } else {
        throw ConfigError("unknown sweep axis \"" + sweep + "\"");
    }
    if (spec.values.empty()) throw ConfigError("sweep requires --values");

    const ExperimentResult res = run_experiment(spec);

    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "results.csv", to_csv(res));
    write_file(dir / "summary.json", to_json_summary(spec, res));
    if (trace) {
        const std::size_t n_schemes = spec.schemes.size();
        for (std::size_t i = 0; i < res.rows.size(); ++i) {
            const ResultRow &r = res.rows[i];
            if (r.trace_bits.empty()) continue;
            const std::size_t vi = i / (n_schemes * spec.num_realizations);
            std::ostringstream os;
            os << "iter,capacity_bits\n";
            for (std::size_t k = 0; k < r.trace_bits.size(); ++k)
                os << k << ',' << detail::fmt_g17(r.trace_bits[k]) << '\n';
            std::ostringstream name;
            name << "trace_" << r.scheme << "_v" << vi << "_r" << r.realization << ".csv";
            write_file(dir / name.str(), os.str());
        }
    }
    std::printf("wrote %s and %s (%zu rows)\n", (dir / "results.csv").c_str(),
                (dir / "summary.json").c_str(), res.rows.size());
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"movable-antenna MIMO capacity optimization under mutual coupling"};
    app.require_subcommand(1);

    auto *ver = app.add_subcommand("version", "print version");

    auto *chk = app.add_subcommand("check-derivatives", "finite-difference oracle suite");
    int trials = 20;
    chk->add_option("--trials", trials, "number of random instances")->check(CLI::PositiveNumber);

    auto *run = app.add_subcommand("run", "seeded Monte Carlo experiment");
    std::string config_path;
    run->add_option("--config", config_path, "key = value config file")->required();
    long long seed = 0;
    auto *seed_opt = run->add_option("--seed", seed, "override config rng_seed");
    int realizations = 200;
    run->add_option("--realizations", realizations, "Monte Carlo draws per sweep value")
        ->check(CLI::PositiveNumber);
    std::string out_dir = ".";
    run->add_option("--out", out_dir, "output directory");
    std::string schemes = "c-ma,nc-ma,ula,cla";
    run->add_option("--schemes", schemes, "comma list: c-ma,nc-ma,ula,cla");
    std::string sweep = "none";
    run->add_option("--sweep", sweep, "sweep axis: antennas|snr");
    std::vector<double> values;
    run->add_option("--values", values, "sweep values")->delimiter(',');
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    run->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    bool trace = false;
    run->add_flag("--trace", trace, "emit per-run convergence traces");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ver->parsed()) {
            std::printf("camimo %s\n", camimo::version_string);
            return 0;
        }
        if (chk->parsed()) return cmd_check_derivatives(trials);
        if (run->parsed())
            return cmd_run(config_path, seed, seed_opt->count() > 0, realizations, out_dir,
                           schemes, sweep, values, workers, trace);
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
