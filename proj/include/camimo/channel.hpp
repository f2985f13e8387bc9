// SPDX-License-Identifier: Apache-2.0
//
// camimo: steering vectors, field response matrices, raw channel, realizations
//
// Positions are in wavelengths, so the phase of an element at position p toward
// angle theta is 2*pi*p*sin(theta). The raw channel is H~ = F^H Sigma G with
// Sigma stored L_R x L_T (rows = receive paths; the transposed orientation is
// dimensionally required by the product).

#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "camimo/config.hpp"
#include "camimo/errors.hpp"
#include "camimo/rng.hpp"

namespace camimo {

using cplx = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using MatR = Eigen::MatrixXd;
using VecC = Eigen::VectorXcd;
using VecR = Eigen::VectorXd;

inline constexpr double two_pi = 6.283185307179586476925286766559;

// One Monte Carlo draw: AoDs, AoAs, path response matrix (L_R x L_T).
struct ChannelRealization {
    VecR aod; // theta_T, L_T angles in [0, pi)
    VecR aoa; // theta_R, L_R angles in [0, pi)
    MatC prm; // Sigma, L_R x L_T
};

// Ordered transmit/receive positions in wavelengths.
struct AntennaLayout {
    VecR tx; // t, length M
    VecR rx; // r, length N

    // Ordering, >= d_min gaps, and [0, D] box, with a 1e-9 slack: gaps of
    // cluster layouts constructed at exactly d_min differ from d_min by ulps.
    static bool feasible(const VecR &p, double d_min, double aperture) {
        const double slack = 1e-9;
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            if (!(p[i] >= -slack && p[i] <= aperture + slack)) return false;
            if (i > 0 && !(p[i] - p[i - 1] >= d_min - slack)) return false;
        }
        return true;
    }

    bool feasible(const SystemConfig &cfg) const {
        return tx.size() == cfg.num_tx && rx.size() == cfg.num_rx &&
               feasible(tx, cfg.min_spacing, cfg.aperture_tx) &&
               feasible(rx, cfg.min_spacing, cfg.aperture_rx);
    }
};

// Array phase response: element k is exp(j*2*pi*p_k*sin(theta)).
inline VecC steering_vector(const VecR &positions, double theta) {
    const double s = std::sin(theta);
    VecC a(positions.size());
    for (Eigen::Index k = 0; k < positions.size(); ++k)
        a[k] = std::exp(cplx(0.0, two_pi * positions[k] * s));
    return a;
}

// FRM: row p = steering_vector(positions, angles[p])^T, shape L x K.
inline MatC field_response(const VecR &positions, const VecR &angles) {
    MatC G(angles.size(), positions.size());
    for (Eigen::Index p = 0; p < angles.size(); ++p) {
        const double s = std::sin(angles[p]);
        for (Eigen::Index k = 0; k < positions.size(); ++k)
            G(p, k) = std::exp(cplx(0.0, two_pi * positions[k] * s));
    }
    return G;
}

inline MatC field_response_tx(const AntennaLayout &layout, const ChannelRealization &real) {
    return field_response(layout.tx, real.aod);
}

inline MatC field_response_rx(const AntennaLayout &layout, const ChannelRealization &real) {
    return field_response(layout.rx, real.aoa);
}

// H~ = F^H Sigma G, N x M.
inline MatC raw_channel(const ChannelRealization &real, const AntennaLayout &layout) {
    const MatC G = field_response_tx(layout, real);
    const MatC F = field_response_rx(layout, real);
    return F.adjoint() * real.prm * G;
}

// d^order/dp_m^order of the FRM: only column m is nonzero; order 1 multiplies
// entry (p, m) by j*2*pi*sin(theta_p), order 2 by -(2*pi*sin(theta_p))^2.
inline MatC frm_derivative(const VecR &positions, const VecR &angles, int m, int order) {
    if (m < 0 || m >= positions.size())
        throw std::out_of_range("frm_derivative: antenna index out of range");
    if (order != 1 && order != 2)
        throw std::invalid_argument("frm_derivative: order must be 1 or 2");
    MatC D = MatC::Zero(angles.size(), positions.size());
    for (Eigen::Index p = 0; p < angles.size(); ++p) {
        const double s = std::sin(angles[p]);
        const cplx e = std::exp(cplx(0.0, two_pi * positions[m] * s));
        D(p, m) = (order == 1) ? cplx(0.0, two_pi * s) * e
                               : cplx(-(two_pi * s) * (two_pi * s), 0.0) * e;
    }
    return D;
}

// Angles i.i.d. uniform on [0, pi); Sigma per the configured PRM model.
// Draw order (fixed for reproducibility): L_T AoDs, L_R AoAs, then the PRM
// normals (diagonal: L real parts then L imaginary parts; full: row-major,
// real then imaginary per entry).
inline ChannelRealization sample_realization(const SystemConfig &cfg, Rng &rng) {
    ChannelRealization real;
    real.aod.resize(cfg.num_tx_paths);
    real.aoa.resize(cfg.num_rx_paths);
    const double pi = two_pi / 2.0;
    for (int p = 0; p < cfg.num_tx_paths; ++p) real.aod[p] = rng.uniform(0.0, pi);
    for (int q = 0; q < cfg.num_rx_paths; ++q) real.aoa[q] = rng.uniform(0.0, pi);
    real.prm = MatC::Zero(cfg.num_rx_paths, cfg.num_tx_paths);
    if (cfg.prm_model == PrmModel::Diagonal) {
        if (cfg.num_tx_paths != cfg.num_rx_paths)
            throw ConfigError("diagonal PRM model requires L_T == L_R");
        const int L = cfg.num_tx_paths;
        const double sd = std::sqrt(1.0 / (2.0 * L));
        std::vector<double> re(L), im(L);
        for (int p = 0; p < L; ++p) re[p] = rng.normal();
        for (int p = 0; p < L; ++p) im[p] = rng.normal();
        for (int p = 0; p < L; ++p) real.prm(p, p) = cplx(re[p] * sd, im[p] * sd);
    } else {
        const double sd = std::sqrt(1.0 / (2.0 * cfg.num_tx_paths));
        for (int q = 0; q < cfg.num_rx_paths; ++q)
            for (int p = 0; p < cfg.num_tx_paths; ++p) {
                const double re = rng.normal(), im = rng.normal();
                real.prm(q, p) = cplx(re * sd, im * sd);
            }
    }
    return real;
}

} // namespace camimo
