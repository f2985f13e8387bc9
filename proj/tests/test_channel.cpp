// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "camimo/camimo.hpp"

using namespace camimo;
using Catch::Approx;

namespace {

MatC raw_channel_loops(const AntennaLayout &lay, const ChannelRealization &real) {
    const auto n_rx = lay.rx.size();
    const auto n_tx = lay.tx.size();
    const auto lt = real.aod.size();
    const auto lr = real.aoa.size();
    MatC h = MatC::Zero(n_rx, n_tx);
    for (Eigen::Index n = 0; n < static_cast<Eigen::Index>(n_rx); ++n)
        for (Eigen::Index m = 0; m < static_cast<Eigen::Index>(n_tx); ++m)
            for (Eigen::Index q = 0; q < static_cast<Eigen::Index>(lr); ++q)
                for (Eigen::Index p = 0; p < static_cast<Eigen::Index>(lt); ++p) {
                    const cplx fr = std::exp(cplx(0.0, two_pi * lay.rx[n] * std::sin(real.aoa[q])));
                    const cplx fg = std::exp(cplx(0.0, two_pi * lay.tx[m] * std::sin(real.aod[p])));
                    h(n, m) += std::conj(fr) * real.prm(q, p) * fg;
                }
    return h;
}

} // namespace

TEST_CASE("steering vector matches closed forms") {
    VecR pos(2);
    pos << 0.0, 0.5;
    const VecC broadside = steering_vector(pos, 0.0);
    CHECK(std::abs(broadside(0) - cplx(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(broadside(1) - cplx(1.0, 0.0)) < 1e-15);
    const VecC endfire = steering_vector(pos, std::acos(-1.0) / 2.0);
    CHECK(std::abs(endfire(0) - cplx(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(endfire(1) - cplx(-1.0, 0.0)) < 1e-12);

    VecR p3(3);
    p3 << 0.0, 0.25, 0.7;
    const double theta = std::acos(-1.0) / 6.0; // sin = 1/2
    const VecC v = steering_vector(p3, theta);
    for (int k = 0; k < 3; ++k) {
        const cplx want = std::exp(cplx(0.0, two_pi * p3(k) * 0.5));
        CHECK(std::abs(v(k) - want) < 1e-14);
        CHECK(std::abs(std::abs(v(k)) - 1.0) < 1e-13);
    }
}

TEST_CASE("field response matrix stacks steering vectors") {
    Rng rng(7);
    VecR pos(3);
    for (int i = 0; i < 3; ++i) pos(i) = rng.uniform(0.0, 4.0);
    VecR ang(2);
    ang << 0.3, 1.1;
    const MatC g = field_response(pos, ang);
    REQUIRE(g.rows() == 2);
    REQUIRE(g.cols() == 3);
    for (int p = 0; p < 2; ++p) {
        const VecC s = steering_vector(pos, ang(p));
        for (int m = 0; m < 3; ++m) CHECK(g(p, m) == s(m));
    }
}

TEST_CASE("raw channel agrees with direct path sum") {
    SystemConfig cfg;
    cfg.num_tx = 3;
    cfg.num_rx = 2;
    Rng rng(11);
    const ChannelRealization real = sample_realization(cfg, rng);
    const AntennaLayout lay = random_feasible_layout(cfg, rng);
    const MatC h = raw_channel(real, lay);
    const MatC want = raw_channel_loops(lay, real);
    REQUIRE(h.rows() == 2);
    REQUIRE(h.cols() == 3);
    CHECK((h - want).norm() < 1e-12 * want.norm());
}

TEST_CASE("raw channel rank one case expands by hand") {
    ChannelRealization real;
    real.aod = VecR::Constant(1, 0.4);
    real.aoa = VecR::Constant(1, 1.2);
    real.prm = MatC::Constant(1, 1, cplx(0.7, -0.3));
    AntennaLayout lay;
    lay.tx = VecR(2);
    lay.tx << 0.1, 1.4;
    lay.rx = VecR(2);
    lay.rx << 0.2, 0.9;
    const MatC h = raw_channel(real, lay);
    for (int n = 0; n < 2; ++n)
        for (int m = 0; m < 2; ++m) {
            const cplx want = cplx(0.7, -0.3) *
                              std::exp(cplx(0.0, -two_pi * lay.rx[n] * std::sin(1.2))) *
                              std::exp(cplx(0.0, two_pi * lay.tx[m] * std::sin(0.4)));
            CHECK(std::abs(h(n, m) - want) < 1e-14);
        }
    CHECK(std::abs(h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0)) < 1e-13); // rank one
}

TEST_CASE("raw channel magnitudes invariant under common array shift") {
    // a common shift multiplies the channel by unit-modulus row/column phases
    // only when each side sees a single propagation path; with several paths
    // the shift rotates path space and changes entry magnitudes
    SystemConfig cfg;
    cfg.num_tx = 4;
    cfg.num_rx = 4;
    cfg.num_tx_paths = cfg.num_rx_paths = 1;
    Rng rng(5);
    const ChannelRealization real = sample_realization(cfg, rng);
    AntennaLayout lay = random_feasible_layout(cfg, rng);
    const MatC h0 = raw_channel(real, lay);
    AntennaLayout shifted = lay;
    for (int m = 0; m < 4; ++m) shifted.tx[m] += 0.37;
    for (int n = 0; n < 4; ++n) shifted.rx[n] += 0.37;
    const MatC h1 = raw_channel(real, shifted);
    CHECK((h1.cwiseAbs() - h0.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("field response derivative matches finite differences") {
    Rng rng(23);
    double max_rel = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        VecR pos(3);
        for (int i = 0; i < 3; ++i) pos(i) = rng.uniform(0.0, 6.0);
        VecR ang(2);
        for (int i = 0; i < 2; ++i) ang(i) = rng.uniform(0.0, std::acos(-1.0));
        const int m = static_cast<int>(rng.uniform(0.0, 3.0));
        const MatC d1 = frm_derivative(pos, ang, m, 1);
        const MatC d2 = frm_derivative(pos, ang, m, 2);
        // step per derivative order: the second difference amplifies rounding by 1/e^2
        const double e1 = 1e-6, e2 = 1e-4;
        auto shifted = [&](double e) {
            VecR p = pos;
            p(m) += e;
            return field_response(p, ang);
        };
        const MatC fd1 = (shifted(e1) - shifted(-e1)) / (2 * e1);
        const MatC fd2 = (shifted(e2) - 2.0 * field_response(pos, ang) + shifted(-e2)) / (e2 * e2);
        max_rel = std::max(max_rel, (d1 - fd1).norm() / std::max(1.0, fd1.norm()));
        max_rel = std::max(max_rel, (d2 - fd2).norm() / std::max(1.0, fd2.norm()));
    }
    CHECK(max_rel < 1e-6);
}

TEST_CASE("field response derivative touches only the selected column") {
    VecR pos(3);
    pos << 0.0, 1.0, 2.5;
    VecR ang(2);
    ang << 0.4, 2.0;
    const MatC d1 = frm_derivative(pos, ang, 1, 1);
    CHECK(d1.col(0).norm() == 0.0);
    CHECK(d1.col(2).norm() == 0.0);
    CHECK(d1.col(1).norm() > 0.0);
    // broadside path contributes zero derivative regardless of position
    VecR flat(1);
    flat << 0.0;
    const MatC d0 = frm_derivative(pos, flat, 1, 1);
    CHECK(d0.norm() == 0.0);
    CHECK_THROWS_AS(frm_derivative(pos, ang, 3, 1), std::out_of_range);
    CHECK_THROWS_AS(frm_derivative(pos, ang, 0, 3), std::invalid_argument);
}

TEST_CASE("sampling is deterministic and respects the diagonal model") {
    SystemConfig cfg;
    Rng a(42), b(42);
    const ChannelRealization r1 = sample_realization(cfg, a);
    const ChannelRealization r2 = sample_realization(cfg, b);
    CHECK(r1.aod == r2.aod);
    CHECK(r1.aoa == r2.aoa);
    CHECK(r1.prm == r2.prm);
    for (int q = 0; q < r1.prm.rows(); ++q)
        for (int p = 0; p < r1.prm.cols(); ++p)
            if (q != p) CHECK(r1.prm(q, p) == cplx(0.0, 0.0));
    for (int i = 0; i < r1.aod.size(); ++i) {
        CHECK(r1.aod(i) >= 0.0);
        CHECK(r1.aod(i) < std::acos(-1.0));
    }
}

TEST_CASE("path gains have the right second moment") {
    SystemConfig cfg;
    cfg.num_tx_paths = cfg.num_rx_paths = 3;
    Rng rng(2024);
    double acc = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        const ChannelRealization r = sample_realization(cfg, rng);
        for (int p = 0; p < 3; ++p) acc += std::norm(r.prm(p, p));
    }
    const double mean = acc / (3.0 * draws);
    CHECK(mean == Approx(1.0 / 3.0).margin(0.05 / 3.0));
}

TEST_CASE("full scattering model fills the whole matrix") {
    SystemConfig cfg;
    cfg.prm_model = PrmModel::Full;
    cfg.num_tx_paths = 2;
    cfg.num_rx_paths = 3;
    Rng rng(9);
    const ChannelRealization r = sample_realization(cfg, rng);
    REQUIRE(r.prm.rows() == 3);
    REQUIRE(r.prm.cols() == 2);
    int nonzero = 0;
    for (int q = 0; q < 3; ++q)
        for (int p = 0; p < 2; ++p) nonzero += std::abs(r.prm(q, p)) > 0.0;
    CHECK(nonzero == 6);
}

TEST_CASE("layout feasibility checks spacing and aperture") {
    VecR good(3);
    good << 0.0, 0.5, 2.0;
    CHECK(AntennaLayout::feasible(good, 0.5, 2.0));
    VecR tight(2);
    tight << 0.0, 0.4;
    CHECK_FALSE(AntennaLayout::feasible(tight, 0.5, 2.0));
    VecR outside(2);
    outside << 0.0, 2.1;
    CHECK_FALSE(AntennaLayout::feasible(outside, 0.5, 2.0));
    VecR unsorted(2);
    unsorted << 1.0, 0.0;
    CHECK_FALSE(AntennaLayout::feasible(unsorted, 0.5, 2.0));
}

TEST_CASE("config validation rejects impossible geometry") {
    SystemConfig cfg;
    cfg.num_tx = 8;
    cfg.aperture_tx = 0.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SystemConfig{};
    cfg.trm_rho1 = 0.8; // must stay below rho2
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SystemConfig{};
    cfg.prm_model = PrmModel::Diagonal;
    cfg.num_tx_paths = 2;
    cfg.num_rx_paths = 3;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SystemConfig{};
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.snr_db() == Approx(5.0));
}
