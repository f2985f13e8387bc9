// SPDX-License-Identifier: Apache-2.0
//
// camimo: capacity optimization for movable-antenna MIMO links under mutual
// coupling. Umbrella header.

#pragma once

#include "camimo/bca.hpp"
#include "camimo/channel.hpp"
#include "camimo/config.hpp"
#include "camimo/coupling.hpp"
#include "camimo/derivatives.hpp"
#include "camimo/diagnostics.hpp"
#include "camimo/errors.hpp"
#include "camimo/experiment.hpp"
#include "camimo/power.hpp"
#include "camimo/rng.hpp"
#include "camimo/trm.hpp"

namespace camimo {
inline constexpr const char *version_string = "1.0.0";
}
