// SPDX-License-Identifier: Apache-2.0
//
// camimo: effective channel and analytic objective derivatives
//
// Effective channel H = C_R^{-1/2} H~ C_T^{-1/2}. The per-coordinate objective
// h_T(t_m) = logdet(I_N + H Qb H^H / sigma^2) has first/second derivatives
// assembled from the FRM derivatives and the Sylvester-equation derivatives of
// C_T^{-1/2}. The receive side is the mirror problem: swap the roles of the
// two arrays, Sigma -> Sigma^H, Qb -> Sbar.

#pragma once

#include <Eigen/Dense>

#include "camimo/channel.hpp"
#include "camimo/coupling.hpp"
#include "camimo/power.hpp"

namespace camimo {

// Coupling-whitened channel. With coupling disabled the raw channel is
// returned untouched (bitwise), never multiplied by identity factors.
inline MatC effective_channel(const ChannelRealization &real, const AntennaLayout &layout,
                              bool coupled) {
    MatC Ht = raw_channel(real, layout);
    if (!coupled) return Ht;
    const CouplingDecomposition dT = decompose(mc_matrix(layout.tx));
    const CouplingDecomposition dR = decompose(mc_matrix(layout.rx));
    return dR.inv_sqrt * Ht * dT.inv_sqrt;
}

// Variant reusing precomputed decompositions (hot path in the optimizer).
inline MatC effective_channel(const ChannelRealization &real, const AntennaLayout &layout,
                              const CouplingDecomposition &dT, const CouplingDecomposition &dR) {
    return dR.inv_sqrt * raw_channel(real, layout) * dT.inv_sqrt;
}

struct DerivativePair {
    double first = 0.0;  // h', nats per wavelength
    double second = 0.0; // h'', nats per wavelength^2
};

namespace detail {

// Core of both derivative directions. Arguments are in "transmit form":
// own = the side whose coordinate m moves (positions, angles), oth = the
// other side, prm maps own-paths (columns) to oth-paths (rows), W is the
// fixed covariance on the own side (Qb for tx, Sbar for rx).
inline DerivativePair objective_derivatives(const VecR &own, const VecR &own_angles,
                                            const VecR &oth, const VecR &oth_angles,
                                            const MatC &prm, const MatC &W, double sigma2,
                                            int m, bool coupled) {
    const MatC G = field_response(own, own_angles);
    const MatC F = field_response(oth, oth_angles);
    const MatC dG1 = frm_derivative(own, own_angles, m, 1);
    const MatC dG2 = frm_derivative(own, own_angles, m, 2);

    MatC H, dH1, dH2;
    if (coupled) {
        const CouplingDecomposition dT = decompose(mc_matrix(own));
        const CouplingDecomposition dR = decompose(mc_matrix(oth));
        const MatR dC1 = mc_matrix_derivative(own, m, 1);
        const MatR dC2 = mc_matrix_derivative(own, m, 2);
        const MatR X1 = inv_sqrt_derivative(dT, dC1);
        const MatR S1 = sqrt_derivative(dT, dC1);
        const MatR X2 = inv_sqrt_second_derivative(dT, dC1, dC2, X1, S1);
        const MatC pre = dR.inv_sqrt * F.adjoint() * prm;
        const MatR &CTi = dT.inv_sqrt;
        H = pre * G * CTi;
        dH1 = pre * (dG1 * CTi + G * X1);
        dH2 = pre * (dG2 * CTi + 2.0 * dG1 * X1 + G * X2);
    } else {
        const MatC pre = F.adjoint() * prm;
        H = pre * G;
        dH1 = pre * dG1;
        dH2 = pre * dG2;
    }

    const Eigen::Index N = H.rows();
    const MatC Phi = (MatC::Identity(N, N) + H * W * H.adjoint() / sigma2).inverse();
    const MatC WHh = W * H.adjoint();
    const MatC T1 = Phi * dH1 * WHh;
    DerivativePair d;
    d.first = 2.0 / sigma2 * T1.trace().real();
    d.second = 2.0 / sigma2 *
               ((Phi * (dH2 * WHh + dH1 * W * dH1.adjoint())).trace().real() -
                (T1 * T1).trace().real() / sigma2 -
                (T1 * Phi * H * W * dH1.adjoint()).trace().real() / sigma2);
    return d;
}

} // namespace detail

// d h_T / d t_m and d^2 h_T / d t_m^2 with Qb fixed.
inline DerivativePair tx_objective_derivatives(const AntennaLayout &layout,
                                               const ChannelRealization &real, const MatC &Qb,
                                               double sigma2, int m, bool coupled) {
    return detail::objective_derivatives(layout.tx, real.aod, layout.rx, real.aoa, real.prm, Qb,
                                         sigma2, m, coupled);
}

// Mirror problem for h_R(r_n) = logdet(I_M + H^H Sbar H / sigma^2):
// H^H = C_T^{-1/2} G^H Sigma^H F C_R^{-1/2}, so swap sides and conjugate Sigma.
inline DerivativePair rx_objective_derivatives(const AntennaLayout &layout,
                                               const ChannelRealization &real, const MatC &Sbar,
                                               double sigma2, int n, bool coupled) {
    return detail::objective_derivatives(layout.rx, real.aoa, layout.tx, real.aod,
                                         real.prm.adjoint(), Sbar, sigma2, n, coupled);
}

// Objective values used by the per-coordinate TRM.
inline double tx_objective(const AntennaLayout &layout, const ChannelRealization &real,
                           const MatC &Qb, double sigma2, bool coupled) {
    return capacity(effective_channel(real, layout, coupled), Qb, sigma2);
}

inline double rx_objective(const AntennaLayout &layout, const ChannelRealization &real,
                           const MatC &Sbar, double sigma2, bool coupled) {
    const MatC H = effective_channel(real, layout, coupled);
    return capacity(H.adjoint(), Sbar, sigma2);
}

} // namespace camimo
