// SPDX-License-Identifier: Apache-2.0
//
// camimo: Monte Carlo experiment harness
//
// Each work item is one (sweep value, realization) pair: the realization is
// sampled from a seed derived only from (base seed, sweep index, realization
// index), every requested scheme runs on it, and rows are written into
// pre-assigned slots. Output is therefore byte-identical for any worker
// count. Per-realization kernel errors land in the row's error column and the
// run continues.

#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "camimo/bca.hpp"
#include "camimo/channel.hpp"
#include "camimo/config.hpp"
#include "camimo/rng.hpp"

namespace camimo {

enum class SweepAxis { None, NumAntennas, SnrDb };

struct ExperimentSpec {
    SystemConfig base;
    SweepAxis axis = SweepAxis::None;
    std::vector<double> values{0.0}; // placeholder single value when axis is None
    int num_realizations = 200;
    std::vector<Scheme> schemes{Scheme::CMa, Scheme::NcMa, Scheme::Ula, Scheme::Cla};
    std::uint64_t seed = 1;
    int workers = 1;
    bool emit_traces = false;

    void validate() const {
        if (values.empty()) throw ConfigError("sweep values must be non-empty");
        if (num_realizations < 1) throw ConfigError("num_realizations must be >= 1");
        if (schemes.empty()) throw ConfigError("schemes must be non-empty");
        if (workers < 1) throw ConfigError("workers must be >= 1");
    }
};

struct ResultRow {
    std::string scheme;
    double sweep_value = 0.0;
    int realization = 0;
    double capacity_bits = 0.0;
    int iters = 0;
    double p_trans = 0.0;
    std::vector<double> gamma; // descending, padded with 0 in the CSV
    std::string error;         // empty on success
    std::vector<double> trace_bits; // per-iteration capacities when requested
};

// Scale the scenario for one sweep value. Antenna sweeps also scale the
// apertures, keeping D = 2M.
inline SystemConfig config_for_value(const SystemConfig &base, SweepAxis axis, double value) {
    SystemConfig cfg = base;
    switch (axis) {
        case SweepAxis::None: break;
        case SweepAxis::NumAntennas: {
            const int m = static_cast<int>(std::lround(value));
            if (m < 1) throw ConfigError("antenna sweep value must be >= 1");
            cfg.num_tx = m;
            cfg.num_rx = m;
            cfg.aperture_tx = 2.0 * m;
            cfg.aperture_rx = 2.0 * m;
            break;
        }
        case SweepAxis::SnrDb:
            cfg.noise_power = cfg.power_budget / std::pow(10.0, value / 10.0);
            break;
    }
    cfg.validate();
    return cfg;
}

namespace detail {

inline SchemeResult run_scheme(Scheme s, const SystemConfig &cfg, const ChannelRealization &real,
                               std::uint64_t item_seed) {
    switch (s) {
        case Scheme::CMa: return run_cma(cfg, real, item_seed);
        case Scheme::NcMa: return baseline_ncma(cfg, real, item_seed);
        case Scheme::Ula: return baseline_ula(cfg, real);
        case Scheme::Cla: return baseline_cla(cfg, real);
    }
    throw ConfigError("unknown scheme");
}

inline std::string sanitize_csv(std::string s) {
    for (char &c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

// Shortest-round-trip decimal for doubles: %.17g always round-trips.
inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

struct ExperimentResult {
    std::vector<ResultRow> rows; // ordered (sweep index, realization, scheme)
    int gamma_columns = 0;
};

inline ExperimentResult run_experiment(const ExperimentSpec &spec) {
    spec.validate();
    const std::size_t n_values = spec.values.size();
    const std::size_t n_real = static_cast<std::size_t>(spec.num_realizations);
    const std::size_t n_schemes = spec.schemes.size();

    std::vector<SystemConfig> cfgs(n_values);
    int gamma_cols = 0;
    for (std::size_t vi = 0; vi < n_values; ++vi) {
        cfgs[vi] = config_for_value(spec.base, spec.axis, spec.values[vi]);
        const int k = std::min(cfgs[vi].num_tx_paths,
                               std::min(cfgs[vi].num_tx, cfgs[vi].num_rx));
        gamma_cols = std::max(gamma_cols, k);
    }

    ExperimentResult out;
    out.gamma_columns = gamma_cols;
    out.rows.resize(n_values * n_real * n_schemes);

    const std::size_t n_items = n_values * n_real;
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t item = next.fetch_add(1);
            if (item >= n_items) return;
            const std::size_t vi = item / n_real;
            const std::size_t ri = item % n_real;
            const SystemConfig &cfg = cfgs[vi];
            const std::uint64_t item_seed = derive_seed(spec.seed, vi, ri);
            Rng rng(item_seed);
            const ChannelRealization real = sample_realization(cfg, rng);
            for (std::size_t si = 0; si < n_schemes; ++si) {
                ResultRow row;
                row.scheme = scheme_name(spec.schemes[si]);
                row.sweep_value = spec.values[vi];
                row.realization = static_cast<int>(ri);
                try {
                    const SchemeResult res =
                        detail::run_scheme(spec.schemes[si], cfg, real, item_seed);
                    row.capacity_bits = res.capacity_bits;
                    row.iters = res.iterations;
                    row.p_trans = res.p_trans;
                    row.gamma = res.gamma;
                    if (spec.emit_traces) {
                        row.trace_bits.reserve(res.trace.capacity_nats.size());
                        for (double c : res.trace.capacity_nats)
                            row.trace_bits.push_back(c / std::log(2.0));
                    }
                } catch (const std::exception &e) {
                    row.error = detail::sanitize_csv(e.what());
                }
                out.rows[(vi * n_real + ri) * n_schemes + si] = std::move(row);
            }
        }
    };

    const int n_workers = std::max(1, spec.workers);
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto &t : pool) t.join();
    }
    return out;
}

// CSV per the fixed schema; floats as shortest-round-trip decimals.
inline std::string to_csv(const ExperimentResult &res) {
    std::ostringstream os;
    os << "scheme,sweep_value,realization,capacity_bits,iters,p_trans";
    for (int k = 1; k <= res.gamma_columns; ++k) os << ",gamma_" << k;
    os << ",error\n";
    for (const ResultRow &r : res.rows) {
        os << r.scheme << ',' << detail::fmt_g17(r.sweep_value) << ',' << r.realization << ','
           << detail::fmt_g17(r.capacity_bits) << ',' << r.iters << ','
           << detail::fmt_g17(r.p_trans);
        for (int k = 0; k < res.gamma_columns; ++k)
            os << ','
               << detail::fmt_g17(k < static_cast<int>(r.gamma.size()) ? r.gamma[k] : 0.0);
        os << ',' << r.error << '\n';
    }
    return os.str();
}

// Round-trip parser for the CSV above (testing/No external consumers).
inline ExperimentResult parse_csv(const std::string &text) {
    ExperimentResult res;
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("empty CSV");
    int gcols = 0;
    {
        std::istringstream hs(line);
        std::string col;
        while (std::getline(hs, col, ','))
            if (col.rfind("gamma_", 0) == 0) ++gcols;
    }
    res.gamma_columns = gcols;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string f;
        ResultRow r;
        std::getline(ls, f, ','); r.scheme = f;
        std::getline(ls, f, ','); r.sweep_value = std::stod(f);
        std::getline(ls, f, ','); r.realization = std::stoi(f);
        std::getline(ls, f, ','); r.capacity_bits = std::stod(f);
        std::getline(ls, f, ','); r.iters = std::stoi(f);
        std::getline(ls, f, ','); r.p_trans = std::stod(f);
        for (int k = 0; k < gcols; ++k) {
            std::getline(ls, f, ',');
            r.gamma.push_back(std::stod(f));
        }
        while (!r.gamma.empty() && r.gamma.back() == 0.0) r.gamma.pop_back();
        std::getline(ls, f); r.error = f;
        res.rows.push_back(std::move(r));
    }
    return res;
}

// JSON summary: per scheme, per sweep value, mean and 95% CI half-width of
// capacity plus mean iterations/P_trans and the error count.
inline std::string to_json_summary(const ExperimentSpec &spec, const ExperimentResult &res) {
    struct Acc {
        std::vector<double> caps;
        double iters_sum = 0.0, ptrans_sum = 0.0;
        int errors = 0;
    };
    std::map<std::string, std::map<double, Acc>> acc;
    for (const ResultRow &r : res.rows) {
        Acc &a = acc[r.scheme][r.sweep_value];
        if (!r.error.empty()) {
            ++a.errors;
            continue;
        }
        a.caps.push_back(r.capacity_bits);
        a.iters_sum += r.iters;
        a.ptrans_sum += r.p_trans;
    }
    nlohmann::json root;
    root["sweep_axis"] = spec.axis == SweepAxis::None ? "none"
                         : spec.axis == SweepAxis::NumAntennas ? "antennas" : "snr";
    root["num_realizations"] = spec.num_realizations;
    nlohmann::json schemes = nlohmann::json::object();
    for (const auto &[scheme, by_val] : acc) {
        nlohmann::json per_val = nlohmann::json::object();
        for (const auto &[val, a] : by_val) {
            const std::size_t n = a.caps.size();
            double mean = 0.0, sd = 0.0;
            for (double c : a.caps) mean += c;
            if (n) mean /= static_cast<double>(n);
            for (double c : a.caps) sd += (c - mean) * (c - mean);
            sd = n > 1 ? std::sqrt(sd / static_cast<double>(n - 1)) : 0.0;
            char vbuf[40];
            std::snprintf(vbuf, sizeof(vbuf), "%.6g", val);
            per_val[vbuf] = {
                {"n", n},
                {"errors", a.errors},
                {"mean_capacity_bits", mean},
                {"ci95_capacity_bits", n > 1 ? 1.96 * sd / std::sqrt(static_cast<double>(n)) : 0.0},
                {"mean_iters", n ? a.iters_sum / static_cast<double>(n) : 0.0},
                {"mean_p_trans", n ? a.ptrans_sum / static_cast<double>(n) : 0.0},
            };
        }
        schemes[scheme] = std::move(per_val);
    }
    root["schemes"] = std::move(schemes);
    return root.dump(2) + "\n";
}

// key = value config text; '#' starts a comment; unknown keys are errors.
inline SystemConfig parse_config_text(const std::string &text) {
    SystemConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const char *ws = " \t\r";
            const std::size_t b = s.find_first_not_of(ws);
            if (b == std::string::npos) return std::string();
            return s.substr(b, s.find_last_not_of(ws) - b + 1);
        };
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string val = trim(stripped.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
        auto as_int = [&](int &dst) { dst = std::stoi(val); };
        auto as_dbl = [&](double &dst) { dst = std::stod(val); };
        try {
            if (key == "num_tx") as_int(cfg.num_tx);
            else if (key == "num_rx") as_int(cfg.num_rx);
            else if (key == "num_tx_paths") as_int(cfg.num_tx_paths);
            else if (key == "num_rx_paths") as_int(cfg.num_rx_paths);
            else if (key == "aperture_tx") as_dbl(cfg.aperture_tx);
            else if (key == "aperture_rx") as_dbl(cfg.aperture_rx);
            else if (key == "min_spacing") as_dbl(cfg.min_spacing);
            else if (key == "power_budget") as_dbl(cfg.power_budget);
            else if (key == "noise_power") as_dbl(cfg.noise_power);
            else if (key == "trm_rho1") as_dbl(cfg.trm_rho1);
            else if (key == "trm_rho2") as_dbl(cfg.trm_rho2);
            else if (key == "trm_nu1") as_dbl(cfg.trm_nu1);
            else if (key == "trm_nu2") as_dbl(cfg.trm_nu2);
            else if (key == "trm_delta0") as_dbl(cfg.trm_delta0);
            else if (key == "max_outer_iters") as_int(cfg.max_outer_iters);
            else if (key == "max_inner_iters") as_int(cfg.max_inner_iters);
            else if (key == "convergence_tol") as_dbl(cfg.convergence_tol);
            else if (key == "rng_seed") cfg.rng_seed = std::stoull(val);
            else if (key == "init_restarts") as_int(cfg.init_restarts);
            else if (key == "prm_model") {
                if (val == "diagonal") cfg.prm_model = PrmModel::Diagonal;
                else if (val == "full") cfg.prm_model = PrmModel::Full;
                else throw ConfigError("prm_model must be diagonal or full");
            } else {
                throw ConfigError("config line " + std::to_string(lineno) + ": unknown key \"" +
                                  key + "\"");
            }
        } catch (const ConfigError &) {
            throw;
        } catch (const std::exception &) {
            throw ConfigError("config line " + std::to_string(lineno) + ": bad value for \"" +
                              key + "\"");
        }
    }
    cfg.validate();
    return cfg;
}

inline SystemConfig load_config_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config_text(os.str());
}

} // namespace camimo
