// SPDX-License-Identifier: Apache-2.0
//
// camimo: capacity and water-filling power allocation
//
// Capacity is natural-log logdet(I + H Q H^H / sigma^2); reporting layers
// divide by ln 2 for bits. The water level is found by the exact sorted
// active-set method, not bisection.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "camimo/channel.hpp"
#include "camimo/errors.hpp"

namespace camimo {

// logdet(I_N + H Q H^H / sigma^2) in nats, via Cholesky of the Hermitian PD
// Gram matrix.
inline double capacity(const MatC &H, const MatC &Q, double sigma2) {
    const Eigen::Index N = H.rows();
    MatC A = MatC::Identity(N, N) + H * Q * H.adjoint() / sigma2;
    Eigen::LLT<MatC> llt(A);
    if (llt.info() != Eigen::Success) {
        // PSD roundoff edge: fall back to Hermitian eigenvalues
        Eigen::SelfAdjointEigenSolver<MatC> es(A);
        double c = 0.0;
        for (Eigen::Index i = 0; i < N; ++i) c += std::log(std::max(es.eigenvalues()[i], 1e-300));
        return c;
    }
    double c = 0.0;
    const auto &L = llt.matrixLLT();
    for (Eigen::Index i = 0; i < N; ++i) c += std::log(L(i, i).real());
    return 2.0 * c;
}

struct WaterfillResult {
    std::vector<double> powers;
    double water_level = 0.0;
};

// Exact water level: sort inverse gains g_s = sigma^2/lambda_s^2 ascending,
// take the largest k with mu_k = (P_max + sum_{s<=k} g_s)/k > g_k, then
// P_s = max(0, mu - g_s).
inline WaterfillResult waterfill(const std::vector<double> &singular_values, double p_max,
                                 double sigma2) {
    const std::size_t S = singular_values.size();
    bool any = false;
    for (double sv : singular_values)
        if (sv > 0.0) any = true;
    if (S == 0 || !any) throw AllChannelsZero("waterfill: every singular value is zero");
    std::vector<double> g(S);
    for (std::size_t s = 0; s < S; ++s) {
        const double sv = singular_values[s];
        g[s] = sv > 0.0 ? sigma2 / (sv * sv) : std::numeric_limits<double>::infinity();
    }
    std::vector<std::size_t> order(S);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return g[a] < g[b]; });
    double mu = 0.0, acc = 0.0;
    bool found = false;
    for (std::size_t k = 1; k <= S; ++k) {
        const double gk = g[order[k - 1]];
        if (!std::isfinite(gk)) break;
        acc += gk;
        const double cand = (p_max + acc) / static_cast<double>(k);
        if (cand > gk) {
            mu = cand;
            found = true;
        }
    }
    if (!found) throw AllChannelsZero("waterfill: no active channel");
    WaterfillResult out;
    out.water_level = mu;
    out.powers.resize(S);
    for (std::size_t s = 0; s < S; ++s) out.powers[s] = std::max(0.0, mu - g[s]);
    return out;
}

// SVD of the effective channel, per-eigenchannel powers, Q and S-bar.
struct PowerAllocation {
    std::vector<double> singular_values; // descending, above rank cutoff
    MatC left_vecs;                      // U-bar, N x S
    MatC right_vecs;                     // V-bar, M x S
    std::vector<double> powers;          // P_s
    double water_level = 0.0;            // mu
    MatC Q;                              // M x M Hermitian PSD
    MatC Sbar;                           // N x N Hermitian PSD
};

// Rank cutoff 1e-12 relative: no power on numerically null channels.
inline PowerAllocation optimal_allocation(const MatC &H, double p_max, double sigma2) {
    Eigen::JacobiSVD<MatC> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VecR sv = svd.singularValues();
    if (sv.size() == 0 || !(sv[0] > 0.0)) throw ZeroChannel("optimal_allocation: H is zero");
    Eigen::Index S = 0;
    while (S < sv.size() && sv[S] > 1e-12 * sv[0]) ++S;
    PowerAllocation pa;
    pa.singular_values.assign(sv.data(), sv.data() + S);
    pa.left_vecs = svd.matrixU().leftCols(S);
    pa.right_vecs = svd.matrixV().leftCols(S);
    WaterfillResult wf = waterfill(pa.singular_values, p_max, sigma2);
    pa.powers = wf.powers;
    pa.water_level = wf.water_level;
    VecR P = Eigen::Map<const VecR>(pa.powers.data(), S);
    pa.Q = pa.right_vecs * P.asDiagonal() * pa.right_vecs.adjoint();
    pa.Sbar = pa.left_vecs * P.asDiagonal() * pa.left_vecs.adjoint();
    return pa;
}

} // namespace camimo
