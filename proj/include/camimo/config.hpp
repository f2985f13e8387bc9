// SPDX-License-Identifier: Apache-2.0
//
// camimo: scenario configuration

#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "camimo/errors.hpp"

namespace camimo {

enum class PrmModel { Diagonal, Full };

// All scenario scalars. Positions and apertures are in wavelengths (kappa*t =
// 2*pi*t); powers are linear and dimensionless with P_max normalized to 1.
struct SystemConfig {
    int num_tx = 8;            // M
    int num_rx = 8;            // N
    int num_tx_paths = 3;      // L_T
    int num_rx_paths = 3;      // L_R
    double aperture_tx = 16.0; // D_T
    double aperture_rx = 16.0; // D_R
    double min_spacing = 0.1;  // d_min
    double power_budget = 1.0; // P_max
    double noise_power = std::pow(10.0, -0.5); // sigma^2 (default SNR 5 dB)
    double trm_rho1 = 0.25;
    double trm_rho2 = 0.75;
    double trm_nu1 = 2.0;
    double trm_nu2 = 4.0;
    double trm_delta0 = 0.25;
    int max_outer_iters = 50;
    int max_inner_iters = 10;
    double convergence_tol = 1e-4; // nats
    std::uint64_t rng_seed = 1;
    PrmModel prm_model = PrmModel::Diagonal;
    int init_restarts = 0; // extra random feasible BCA starts, best kept

    double snr_db() const { return 10.0 * std::log10(power_budget / noise_power); }

    void validate() const {
        auto fail = [](const std::string &m) { throw ConfigError(m); };
        if (num_tx < 1 || num_rx < 1) fail("antenna counts must be positive");
        if (num_tx_paths < 1 || num_rx_paths < 1) fail("path counts must be positive");
        if (!(aperture_tx > 0.0) || !(aperture_rx > 0.0)) fail("apertures must be positive");
        if (!(min_spacing > 0.0)) fail("min_spacing must be positive");
        if (!(power_budget > 0.0) || !(noise_power > 0.0)) fail("powers must be positive");
        if (!(trm_rho1 > 0.0 && trm_rho1 < trm_rho2 && trm_rho2 < 1.0))
            fail("require 0 < rho1 < rho2 < 1");
        if (!(trm_nu1 > 1.0) || !(trm_nu2 > 1.0)) fail("require nu1 > 1 and nu2 > 1");
        if (!(trm_delta0 > 0.0)) fail("trm_delta0 must be positive");
        if (max_outer_iters < 1 || max_inner_iters < 1) fail("iteration caps must be >= 1");
        if (!(convergence_tol > 0.0)) fail("convergence_tol must be positive");
        if ((num_tx - 1) * min_spacing > aperture_tx)
            fail("(M-1)*d_min exceeds aperture_tx: infeasible");
        if ((num_rx - 1) * min_spacing > aperture_rx)
            fail("(N-1)*d_min exceeds aperture_rx: infeasible");
        if (prm_model == PrmModel::Diagonal && num_tx_paths != num_rx_paths)
            fail("diagonal PRM model requires L_T == L_R");
        if (init_restarts < 0) fail("init_restarts must be >= 0");
    }
};

} // namespace camimo
