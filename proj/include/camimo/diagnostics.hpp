// SPDX-License-Identifier: Apache-2.0
//
// camimo: superdirectivity and SNR-spectrum diagnostics

#pragma once

#include <algorithm>
#include <vector>

#include <Eigen/Dense>

#include "camimo/channel.hpp"
#include "camimo/coupling.hpp"

namespace camimo {

// Radiated power density sum P_trans = tr(G C_T^{-1/2} Q C_T^{-1/2} G^H);
// reduces to tr(G Q G^H) under identity coupling.
inline double superdirectivity_metric(const AntennaLayout &layout, const ChannelRealization &real,
                                      const MatC &Q, bool coupled) {
    const MatC G = field_response_tx(layout, real);
    if (!coupled) return (G * Q * G.adjoint()).trace().real();
    const MatR Ci = decompose(mc_matrix(layout.tx)).inv_sqrt;
    return (G * Ci * Q * Ci * G.adjoint()).trace().real();
}

// Eigenvalues of Gamma = H Q H^H / sigma^2, descending, values below
// 1e-10 * max dropped.
inline std::vector<double> snr_matrix_eigenvalues(const MatC &H, const MatC &Q, double sigma2) {
    const MatC Gm = H * Q * H.adjoint() / sigma2;
    Eigen::SelfAdjointEigenSolver<MatC> es(Gm);
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + Gm.rows());
    std::sort(ev.begin(), ev.end(), std::greater<double>());
    if (ev.empty()) return ev;
    const double cut = 1e-10 * std::max(ev.front(), 0.0);
    while (!ev.empty() && !(ev.back() > cut)) ev.pop_back();
    return ev;
}

} // namespace camimo
