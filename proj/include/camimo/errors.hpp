// SPDX-License-Identifier: Apache-2.0
//
// camimo: capacity optimization for movable-antenna MIMO links under mutual coupling

#pragma once

#include <stdexcept>
#include <string>

namespace camimo {

// Coupling matrix eigenvalue at or below pd_floor: antennas too tightly packed
// for the numerical tolerance. Never silently regularized.
struct NotPositiveDefinite : std::runtime_error {
    explicit NotPositiveDefinite(const std::string &msg) : std::runtime_error(msg) {}
};

// Defensive: Sylvester pencil lambda_i + lambda_j below tolerance (cannot occur
// for a positive-definite coefficient).
struct SingularPencil : std::runtime_error {
    explicit SingularPencil(const std::string &msg) : std::runtime_error(msg) {}
};

// Water-filling over an all-zero singular spectrum.
struct AllChannelsZero : std::runtime_error {
    explicit AllChannelsZero(const std::string &msg) : std::runtime_error(msg) {}
};

// optimal_allocation on a numerically zero channel.
struct ZeroChannel : std::runtime_error {
    explicit ZeroChannel(const std::string &msg) : std::runtime_error(msg) {}
};

// BCA entry layout violates ordering/spacing/box constraints.
struct InfeasibleInit : std::runtime_error {
    explicit InfeasibleInit(const std::string &msg) : std::runtime_error(msg) {}
};

// Bad config file or invalid SystemConfig field combination.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace camimo
