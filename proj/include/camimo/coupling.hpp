// SPDX-License-Identifier: Apache-2.0
//
// camimo: sinc mutual-coupling matrices, C^{+-1/2}, and their derivatives
//
// C[a,b] = sinc(2*pi*(p_a - p_b)) for isotropic elements on a line. The
// derivatives of C^{-1/2} and C^{1/2} along one coordinate solve Sylvester
// (Lyapunov) equations with coefficient C^{1/2}; they are solved exactly in
// the eigenbasis of C, where C^{1/2} shares eigenvectors with eigenvalues
// sqrt(lambda).

#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "camimo/channel.hpp"
#include "camimo/errors.hpp"

namespace camimo {

// Relative eigenvalue floor for decompose(). Below it, antennas are too
// tightly packed for the numerical tolerance and decompose throws instead of
// regularizing (silent regularization would corrupt superdirectivity results).
// 1e-12: the 0.1-lambda compact baseline at M=8 sits near 1e-11 relative.
inline constexpr double pd_floor_rel = 1e-12;

// sinc(2*pi*d) with a Taylor guard near 0 (1 - x^2/6 for |x| < 1e-6).
inline double sinc_2pi(double d) {
    const double x = two_pi * d;
    if (std::abs(x) < 1e-6) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

// d/dDelta sinc(2*pi*Delta); odd in Delta. Series guard for small arguments.
inline double sinc_2pi_d1(double d) {
    const double u = two_pi * d;
    if (std::abs(u) < 1e-4) return two_pi * (-u / 3.0 + u * u * u / 30.0);
    return two_pi * (std::cos(u) / u - std::sin(u) / (u * u));
}

// d^2/dDelta^2 sinc(2*pi*Delta); even in Delta.
inline double sinc_2pi_d2(double d) {
    const double u = two_pi * d;
    if (std::abs(u) < 1e-4) return two_pi * two_pi * (-1.0 / 3.0 + u * u / 10.0);
    return two_pi * two_pi *
           (-std::sin(u) / u - 2.0 * std::cos(u) / (u * u) + 2.0 * std::sin(u) / (u * u * u));
}

// Coupling matrix: entry (a,b) = sinc(2*pi*(p_a - p_b)); unit diagonal.
inline MatR mc_matrix(const VecR &positions) {
    const Eigen::Index n = positions.size();
    MatR C(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        C(a, a) = 1.0;
        for (Eigen::Index b = 0; b < a; ++b) {
            const double v = sinc_2pi(positions[a] - positions[b]);
            C(a, b) = v;
            C(b, a) = v;
        }
    }
    return C;
}

// d^order/dp_m^order of mc_matrix: nonzero only in row m and column m
// (off-diagonal); symmetric because sinc' is odd and sinc'' even.
inline MatR mc_matrix_derivative(const VecR &positions, int m, int order) {
    const Eigen::Index n = positions.size();
    if (m < 0 || m >= n) throw std::out_of_range("mc_matrix_derivative: index out of range");
    if (order != 1 && order != 2)
        throw std::invalid_argument("mc_matrix_derivative: order must be 1 or 2");
    MatR D = MatR::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        if (a == m) continue;
        const double d = positions[m] - positions[a];
        const double v = (order == 1) ? sinc_2pi_d1(d) : sinc_2pi_d2(d);
        D(m, a) = v;
        D(a, m) = v;
    }
    return D;
}

// Eigen-factorization of a coupling matrix with its symmetric square root and
// inverse square root. Immutable value object.
struct CouplingDecomposition {
    MatR C;
    VecR eigvals;  // ascending (Eigen's order)
    MatR eigvecs;  // orthonormal columns
    MatR sqrt;     // C^{1/2}
    MatR inv_sqrt; // C^{-1/2}
};

inline CouplingDecomposition decompose(const MatR &C) {
    Eigen::SelfAdjointEigenSolver<MatR> es(C);
    if (es.info() != Eigen::Success)
        throw NotPositiveDefinite("decompose: eigensolver failed");
    CouplingDecomposition dec;
    dec.C = C;
    dec.eigvals = es.eigenvalues();
    dec.eigvecs = es.eigenvectors();
    const double wmax = dec.eigvals[dec.eigvals.size() - 1];
    const double floor = pd_floor_rel * wmax;
    if (!(dec.eigvals[0] > floor)) {
        std::ostringstream os;
        os << "decompose: eigenvalue " << dec.eigvals[0] << " at or below pd floor " << floor
           << " (antennas too tightly packed for the numerical tolerance)";
        throw NotPositiveDefinite(os.str());
    }
    const VecR rt = dec.eigvals.array().sqrt();
    dec.sqrt = dec.eigvecs * rt.asDiagonal() * dec.eigvecs.transpose();
    dec.inv_sqrt = dec.eigvecs * rt.cwiseInverse().asDiagonal() * dec.eigvecs.transpose();
    return dec;
}

// Solve X A + A X = B in the eigenbasis of A: Xt_ij = Bt_ij / (w_i + w_j).
inline MatR lyapunov_in_basis(const VecR &w, const MatR &V, const MatR &B) {
    const double wmax = w.cwiseAbs().maxCoeff();
    MatR Bt = V.transpose() * B * V;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        for (Eigen::Index j = 0; j < w.size(); ++j) {
            const double s = w[i] + w[j];
            if (!(std::abs(s) > 1e-15 * std::max(1.0, wmax)))
                throw SingularPencil("lyapunov: eigenvalue sum below tolerance");
            Bt(i, j) /= s;
        }
    return V * Bt * V.transpose();
}

// Public form: A symmetric positive definite.
inline MatR solve_lyapunov(const MatR &A, const MatR &B) {
    Eigen::SelfAdjointEigenSolver<MatR> es(A);
    if (es.info() != Eigen::Success) throw SingularPencil("solve_lyapunov: eigensolver failed");
    return lyapunov_in_basis(es.eigenvalues(), es.eigenvectors(), B);
}

// X' with X' C^{1/2} + C^{1/2} X' = -C^{-1/2} dC C^{-1/2}.
inline MatR inv_sqrt_derivative(const CouplingDecomposition &dec, const MatR &dC) {
    const MatR rhs = -dec.inv_sqrt * dC * dec.inv_sqrt;
    return lyapunov_in_basis(dec.eigvals.array().sqrt(), dec.eigvecs, rhs);
}

// S' with S' C^{1/2} + C^{1/2} S' = dC.
inline MatR sqrt_derivative(const CouplingDecomposition &dec, const MatR &dC) {
    return lyapunov_in_basis(dec.eigvals.array().sqrt(), dec.eigvecs, dC);
}

// X'' with X'' C^{1/2} + C^{1/2} X'' =
//   -C^{-1/2} d2C C^{-1/2} - C^{-1/2} dC X' - X' dC C^{-1/2} - S' X' - X' S'.
// The Sylvester coefficient is C^{1/2} (differentiate the X' equation).
inline MatR inv_sqrt_second_derivative(const CouplingDecomposition &dec, const MatR &dC,
                                       const MatR &d2C, const MatR &X1, const MatR &S1) {
    const MatR rhs = -dec.inv_sqrt * d2C * dec.inv_sqrt - dec.inv_sqrt * dC * X1 -
                     X1 * dC * dec.inv_sqrt - S1 * X1 - X1 * S1;
    return lyapunov_in_basis(dec.eigvals.array().sqrt(), dec.eigvecs, rhs);
}

} // namespace camimo
