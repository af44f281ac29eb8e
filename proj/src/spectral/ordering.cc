// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <ostream>

#include "cgoinv/errors.h"
#include "cgoinv/spectral.h"

namespace cgoinv {

std::string_view OrderingName(OrderingKind kind) {
  return kind == OrderingKind::kBox ? "box" : "hyperbolic";
}

OrderingKind ParseOrderingKind(std::string_view name) {
  if (name == "box") return OrderingKind::kBox;
  if (name == "hyperbolic") return OrderingKind::kHyperbolic;
  throw InvalidArgument("unknown ordering kind: " + std::string(name));
}

std::int64_t OrderingKey(OrderingKind kind, std::span<const int> k) {
  if (kind == OrderingKind::kBox) {
    std::int64_t m = 0;
    for (int v : k) m = std::max<std::int64_t>(m, std::abs(v));
    return m;
  }
  std::int64_t p = 1;
  for (int v : k) p *= std::max(std::abs(v), 1);
  return p;
}

FreqOrdering::FreqOrdering(OrderingKind kind, int dim, std::vector<int> points)
    : kind_(kind), dim_(dim), points_(std::move(points)) {
  if (dim < 1 || points_.size() % dim != 0) {
    throw InvalidArgument("ordering points do not match the dimension");
  }
}

namespace {

// Number of points of Z^dim with prod_j max(|k_j|,1) <= budget.
std::int64_t HyperbolicCount(int dim, std::int64_t budget) {
  if (dim == 0) return 1;
  // |v| in {0, 1} contributes factor 1 (three values), |v| = a >= 2
  // contributes a (two values). Values of a sharing budget / a are grouped.
  std::int64_t total = 3 * HyperbolicCount(dim - 1, budget);
  for (std::int64_t a = 2; a <= budget;) {
    const std::int64_t quotient = budget / a;
    const std::int64_t last = budget / quotient;
    total += 2 * (last - a + 1) * HyperbolicCount(dim - 1, quotient);
    a = last + 1;
  }
  return total;
}

void EnumerateHyperbolic(int dim, std::int64_t budget, std::vector<int>& prefix,
                         std::vector<int>& out) {
  if (static_cast<int>(prefix.size()) == dim) {
    out.insert(out.end(), prefix.begin(), prefix.end());
    return;
  }
  for (std::int64_t v = -budget; v <= budget; ++v) {
    const std::int64_t a = std::max<std::int64_t>(std::abs(v), 1);
    prefix.push_back(static_cast<int>(v));
    EnumerateHyperbolic(dim, budget / a, prefix, out);
    prefix.pop_back();
  }
}

void EnumerateBox(int dim, int radius, std::vector<int>& out) {
  std::vector<int> k(dim, -radius);
  while (true) {
    out.insert(out.end(), k.begin(), k.end());
    int a = dim - 1;
    while (a >= 0 && k[a] == radius) {
      k[a] = -radius;
      --a;
    }
    if (a < 0) break;
    ++k[a];
  }
}

}  // namespace

FreqOrdering MakeOrdering(OrderingKind kind, int dim, std::size_t count) {
  if (count < 1) throw InvalidArgument("ordering count must be >= 1");
  if (dim < 1) throw DimensionError("ordering dimension must be >= 1");

  std::vector<int> candidates;
  if (kind == OrderingKind::kBox) {
    int radius = 0;
    auto cube = [&](int r) {
      double c = 1.0;
      for (int a = 0; a < dim; ++a) c *= 2.0 * r + 1.0;
      return c;
    };
    while (cube(radius) < static_cast<double>(count)) ++radius;
    EnumerateBox(dim, radius, candidates);
  } else {
    std::int64_t budget = 1;
    while (HyperbolicCount(dim, budget) < static_cast<std::int64_t>(count)) {
      budget *= 2;
    }
    // Bisect down to the smallest complete key level that suffices.
    std::int64_t lo = budget / 2, hi = budget;
    while (hi - lo > 1) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      if (HyperbolicCount(dim, mid) >= static_cast<std::int64_t>(count)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    budget = hi;
    std::vector<int> prefix;
    EnumerateHyperbolic(dim, budget, prefix, candidates);
  }

  const std::size_t total = candidates.size() / dim;
  struct Entry {
    std::int64_t key;
    std::int64_t norm2;
    std::size_t index;
  };
  std::vector<Entry> entries(total);
  for (std::size_t i = 0; i < total; ++i) {
    std::span<const int> k(candidates.data() + i * dim, dim);
    std::int64_t n2 = 0;
    for (int v : k) n2 += static_cast<std::int64_t>(v) * v;
    entries[i] = {OrderingKey(kind, k), n2, i};
  }
  auto lex_less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(
        candidates.begin() + a * dim, candidates.begin() + (a + 1) * dim,
        candidates.begin() + b * dim, candidates.begin() + (b + 1) * dim);
  };
  auto less = [&](const Entry& a, const Entry& b) {
    if (a.key != b.key) return a.key < b.key;
    if (a.norm2 != b.norm2) return a.norm2 < b.norm2;
    return lex_less(a.index, b.index);
  };
  if (count < total) {
    std::nth_element(entries.begin(), entries.begin() + count, entries.end(),
                     less);
    entries.resize(count);
  }
  std::sort(entries.begin(), entries.end(), less);

  std::vector<int> points;
  points.reserve(count * dim);
  for (const Entry& e : entries) {
    points.insert(points.end(), candidates.begin() + e.index * dim,
                  candidates.begin() + (e.index + 1) * dim);
  }
  return FreqOrdering(kind, dim, std::move(points));
}

void WriteOrderingCsv(std::ostream& out, const FreqOrdering& ordering) {
  out << "l";
  for (int a = 1; a <= ordering.dim(); ++a) out << ",k_" << a;
  out << '\n';
  for (std::size_t l = 0; l < ordering.size(); ++l) {
    out << (l + 1);
    for (int v : ordering[l]) out << ',' << v;
    out << '\n';
  }
}

}  // namespace cgoinv
