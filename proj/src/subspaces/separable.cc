// SPDX-License-Identifier: Apache-2.0
#include "subspaces/separable.h"

#include <algorithm>

#include "cgoinv/kernels.h"

namespace cgoinv::internal {

Complex SeparableSum(const TorusGrid& grid, std::span<const Complex> data,
                     const std::vector<std::vector<Complex>>& tables) {
  const int d = grid.dim();
  const std::size_t n = static_cast<std::size_t>(grid.n());
  thread_local std::vector<Complex> conj_table, a_buf, b_buf;

  // Contract the fastest axis first; each step shrinks the array by n.
  std::span<const Complex> current = data;
  std::size_t rows = grid.size() / n;
  std::vector<Complex>* out = &a_buf;
  for (int axis = d - 1; axis >= 0; --axis) {
    conj_table.resize(n);
    std::transform(tables[axis].begin(), tables[axis].end(), conj_table.begin(),
                   [](const Complex& v) { return std::conj(v); });
    out->resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      (*out)[r] = kernels::DotConj(conj_table, current.subspan(r * n, n));
    }
    current = std::span<const Complex>(out->data(), rows);
    out = out == &a_buf ? &b_buf : &a_buf;
    rows /= n;
  }
  return current[0];
}

}  // namespace cgoinv::internal
