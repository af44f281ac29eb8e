// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "cgoinv/spectral.h"

namespace cgoinv::internal {

// sum over the grid box of data[idx] * prod_a tables[a][slot_a(idx)], with
// data in grid (row-major, axis 0 slowest) order and tables[a] indexed by
// the FFT slot along axis a.
Complex SeparableSum(const TorusGrid& grid, std::span<const Complex> data,
                     const std::vector<std::vector<Complex>>& tables);

}  // namespace cgoinv::internal
