// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "cgoinv/errors.h"
#include "cgoinv/kernels.h"
#include "cgoinv/subspaces.h"
#include "subspaces/separable.h"

namespace cgoinv {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAlignTol = 1e-9;

// sinh(u)/u, with the series near the origin.
Complex Sinhc(Complex u) {
  if (std::abs(u) < 1e-4) {
    const Complex u2 = u * u;
    return 1.0 + u2 / 6.0 + u2 * u2 / 120.0;
  }
  return std::sinh(u) / u;
}

// Integral of e^{z x} over [a, a + s].
Complex ExpIntegral1d(double a, double s, Complex z) {
  return s * std::exp(z * (a + 0.5 * s)) * Sinhc(0.5 * z * s);
}

// 1D Haar analysis matrix on 2^level equal slabs, in the basis of
// normalized slab indicators. Row 0 is the scaling function.
std::vector<double> HaarMatrix1d(int level) {
  const int size = 1 << level;
  std::vector<double> h(static_cast<std::size_t>(size) * size, 0.0);
  for (int c = 0; c < size; ++c) h[c] = 1.0 / std::sqrt(size);
  int row = 1;
  for (int l = 0; l < level; ++l) {
    const int support = size >> l;  // slabs per wavelet
    const double v = 1.0 / std::sqrt(support);
    for (int pos = 0; pos < (1 << l); ++pos, ++row) {
      for (int c = 0; c < support; ++c) {
        h[static_cast<std::size_t>(row) * size + pos * support + c] =
            c < support / 2 ? v : -v;
      }
    }
  }
  return h;
}

std::vector<double> Kronecker(const std::vector<double>& a, int na,
                              const std::vector<double>& b, int nb) {
  std::vector<double> out(static_cast<std::size_t>(na) * nb * na * nb);
  const int n = na * nb;
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j)
      for (int p = 0; p < nb; ++p)
        for (int q = 0; q < nb; ++q)
          out[static_cast<std::size_t>(i * nb + p) * n + (j * nb + q)] =
              a[static_cast<std::size_t>(i) * na + j] *
              b[static_cast<std::size_t>(p) * nb + q];
  return out;
}

}  // namespace

std::string_view FamilyName(Family family) {
  switch (family) {
    case Family::kBandlimited:
      return "bandlimited";
    case Family::kPiecewise:
      return "piecewise";
    case Family::kHaar:
      return "haar";
  }
  return "?";
}

Family ParseFamily(std::string_view name) {
  if (name == "bandlimited") return Family::kBandlimited;
  if (name == "piecewise") return Family::kPiecewise;
  if (name == "haar") return Family::kHaar;
  throw InvalidArgument("unknown subspace family: " + std::string(name));
}

double Cell::Volume() const {
  double v = 1.0;
  for (double s : sides) v *= s;
  return v;
}

double Partition::MinWeight() const {
  const double scale = std::pow(static_cast<double>(cells.size()), 1.0 / dim);
  double a = std::numeric_limits<double>::infinity();
  for (const Cell& c : cells)
    for (double s : c.sides) a = std::min(a, s * scale);
  return a;
}

void Partition::Validate() const {
  if (dim < 1) throw DimensionError("partition dimension must be >= 1");
  if (cells.empty()) throw InvalidArgument("partition has no cells");
  for (const Cell& c : cells) {
    if (static_cast<int>(c.corner.size()) != dim ||
        static_cast<int>(c.sides.size()) != dim) {
      throw DimensionError("cell dimension does not match the partition");
    }
    for (int a = 0; a < dim; ++a) {
      if (!(c.sides[a] > 0.0)) throw InvalidArgument("cell side must be > 0");
      if (c.corner[a] < -1e-12 || c.corner[a] + c.sides[a] > 1.0 + 1e-12) {
        throw InvalidArgument("cell leaves the unit cube");
      }
    }
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t j = i + 1; j < cells.size(); ++j) {
      bool overlap = true;
      for (int a = 0; a < dim && overlap; ++a) {
        const double lo = std::max(cells[i].corner[a], cells[j].corner[a]);
        const double hi = std::min(cells[i].corner[a] + cells[i].sides[a],
                                   cells[j].corner[a] + cells[j].sides[a]);
        overlap = hi - lo > 1e-12;
      }
      if (overlap) throw InvalidArgument("partition cells overlap");
    }
  }
}

Partition Partition::Uniform(std::span<const int> per_axis) {
  Partition p;
  p.dim = static_cast<int>(per_axis.size());
  for (int v : per_axis) {
    if (v < 1) throw InvalidArgument("slab count must be >= 1");
  }
  std::vector<int> idx(p.dim, 0);
  while (true) {
    Cell c;
    for (int a = 0; a < p.dim; ++a) {
      c.sides.push_back(1.0 / per_axis[a]);
      c.corner.push_back(static_cast<double>(idx[a]) / per_axis[a]);
    }
    p.cells.push_back(std::move(c));
    int a = p.dim - 1;
    while (a >= 0 && idx[a] == per_axis[a] - 1) idx[a--] = 0;
    if (a < 0) break;
    ++idx[a];
  }
  return p;
}

Partition Partition::Dyadic(int dim, int level) {
  if (level < 0 || level > 10) throw InvalidArgument("Haar level out of range");
  std::vector<int> per_axis(dim, 1 << level);
  return Uniform(per_axis);
}

std::size_t SubspaceSpec::Dimension() const {
  switch (family) {
    case Family::kBandlimited: {
      std::size_t m = 1;
      for (int a = 0; a < dim; ++a) m *= static_cast<std::size_t>(2 * bandwidth + 1);
      return m;
    }
    case Family::kPiecewise:
      return partition.size();
    case Family::kHaar:
      return std::size_t{1} << (level * dim);
  }
  return 0;
}

SubspaceSpec SubspaceSpec::Bandlimited(int dim, int bandwidth) {
  SubspaceSpec s;
  s.family = Family::kBandlimited;
  s.dim = dim;
  s.bandwidth = bandwidth;
  return s;
}

SubspaceSpec SubspaceSpec::Piecewise(Partition partition) {
  SubspaceSpec s;
  s.family = Family::kPiecewise;
  s.dim = partition.dim;
  s.partition = std::move(partition);
  return s;
}

SubspaceSpec SubspaceSpec::Haar(int dim, int level) {
  SubspaceSpec s;
  s.family = Family::kHaar;
  s.dim = dim;
  s.level = level;
  return s;
}

BoxConstraint::BoxConstraint(double radius) : R(radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("box radius R must be positive and finite");
  }
}

Complex CharFourier(const Cell& cell, std::span<const int> k) {
  if (k.size() != cell.sides.size()) {
    throw DimensionError("frequency dimension does not match the cell");
  }
  Complex out = 1.0;
  for (std::size_t a = 0; a < k.size(); ++a) {
    const double s = cell.sides[a];
    if (k[a] == 0) {
      out *= s;
      continue;
    }
    const double arg = kPi * k[a] * s;
    out *= s * std::sin(arg) / arg *
           std::polar(1.0, -2.0 * kPi * k[a] * (cell.corner[a] + 0.5 * s));
  }
  return out;
}

Complex CellExpIntegral(const Cell& cell, std::span<const Complex> w) {
  if (w.size() != cell.sides.size()) {
    throw DimensionError("exponent dimension does not match the cell");
  }
  Complex out = 1.0;
  for (std::size_t a = 0; a < w.size(); ++a) {
    out *= ExpIntegral1d(cell.corner[a], cell.sides[a], w[a]);
  }
  return out;
}

// ---------------------------------------------------------------------------

SubspaceBasis::SubspaceBasis(SubspaceSpec spec) : spec_(std::move(spec)) {
  BuildClosedForm();
}

SubspaceBasis::SubspaceBasis(SubspaceSpec spec, const TorusGrid& grid)
    : spec_(std::move(spec)), grid_(grid) {
  if (grid.dim() != spec_.dim) {
    throw DimensionError("subspace and grid dimensions differ");
  }
  BuildClosedForm();
  BuildSamples();
}

void SubspaceBasis::BuildClosedForm() {
  if (spec_.dim < 1) throw DimensionError("subspace dimension must be >= 1");
  switch (spec_.family) {
    case Family::kBandlimited: {
      if (spec_.bandwidth < 0) throw InvalidArgument("bandwidth must be >= 0");
      const int b = spec_.bandwidth;
      std::vector<int> k(spec_.dim, -b);
      while (true) {
        frequencies_.insert(frequencies_.end(), k.begin(), k.end());
        int a = spec_.dim - 1;
        while (a >= 0 && k[a] == b) k[a--] = -b;
        if (a < 0) break;
        ++k[a];
      }
      size_ = frequencies_.size() / spec_.dim;
      break;
    }
    case Family::kPiecewise:
      if (spec_.partition.dim != spec_.dim) {
        throw DimensionError("partition dimension does not match the spec");
      }
      spec_.partition.Validate();
      cells_ = spec_.partition;
      size_ = cells_.size();
      break;
    case Family::kHaar: {
      cells_ = Partition::Dyadic(spec_.dim, spec_.level);
      const int side = 1 << spec_.level;
      const std::vector<double> h1 = HaarMatrix1d(spec_.level);
      std::vector<double> h = h1;
      int n = side;
      for (int a = 1; a < spec_.dim; ++a) {
        h = Kronecker(h, n, h1, side);
        n *= side;
      }
      haar_ = std::move(h);
      size_ = cells_.size();
      break;
    }
  }
}

void SubspaceBasis::BuildSamples() {
  const TorusGrid& g = *grid_;
  const int n = g.n();
  const int d = g.dim();
  if (spec_.family == Family::kBandlimited) {
    if (2 * spec_.bandwidth >= n) {
      throw BandwidthError("bandwidth B must satisfy B < n/2");
    }
    samples_.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i) {
      Spectrum s(g);
      s.at(frequency(i)) = 1.0;
      samples_.push_back(InverseTransform(s));
    }
    return;
  }

  // Node lists of every cell; faces must lie on grid planes.
  cell_nodes_.resize(cells_.size());
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const Cell& cell = cells_.cells[c];
    std::vector<int> lo(d), hi(d);
    for (int a = 0; a < d; ++a) {
      const double l = cell.corner[a] * n;
      const double h = (cell.corner[a] + cell.sides[a]) * n;
      if (std::abs(l - std::round(l)) > kAlignTol ||
          std::abs(h - std::round(h)) > kAlignTol) {
        throw MisalignedPartitionError(
            "cell faces must lie on grid planes x_j = i/n");
      }
      lo[a] = static_cast<int>(std::lround(l));
      hi[a] = static_cast<int>(std::lround(h));
    }
    std::vector<int> j(lo);
    while (true) {
      std::size_t index = 0;
      for (int a = 0; a < d; ++a) index = index * n + j[a];
      cell_nodes_[c].push_back(static_cast<std::uint32_t>(index));
      int a = d - 1;
      while (a >= 0 && j[a] == hi[a] - 1) {
        j[a] = lo[a];
        --a;
      }
      if (a < 0) break;
      ++j[a];
    }
  }

  samples_.assign(size_, Field(g));
  for (std::size_t i = 0; i < size_; ++i) {
    std::vector<Complex> unit(size_, 0.0);
    unit[i] = 1.0;
    const std::vector<Complex> values = CellValues(unit);
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      for (std::uint32_t node : cell_nodes_[c]) samples_[i].values[node] = values[c];
    }
  }
}

const TorusGrid& SubspaceBasis::grid() const {
  if (!grid_) throw InvalidArgument("basis was built without a grid");
  return *grid_;
}

std::span<const int> SubspaceBasis::frequency(std::size_t i) const {
  if (spec_.family != Family::kBandlimited) {
    throw InvalidArgument("frequency() is defined for bandlimited bases only");
  }
  return {frequencies_.data() + i * spec_.dim,
          static_cast<std::size_t>(spec_.dim)};
}

Complex SubspaceBasis::FourierCoefficient(std::size_t i,
                                          std::span<const int> k) const {
  std::vector<Complex> row(size_);
  FourierRow(k, row);
  return row[i];
}

void SubspaceBasis::FourierRow(std::span<const int> k,
                               std::span<Complex> out) const {
  if (static_cast<int>(k.size()) != spec_.dim || out.size() != size_) {
    throw DimensionError("FourierRow argument sizes");
  }
  if (spec_.family == Family::kBandlimited) {
    std::fill(out.begin(), out.end(), 0.0);
    const int b = spec_.bandwidth;
    std::size_t index = 0;
    for (int v : k) {
      if (std::abs(v) > b) return;
      index = index * (2 * b + 1) + static_cast<std::size_t>(v + b);
    }
    out[index] = 1.0;
    return;
  }
  std::vector<Complex> f(cells_.size());
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    f[c] = CharFourier(cells_.cells[c], k) / std::sqrt(cells_.cells[c].Volume());
  }
  if (haar_.empty()) {
    std::copy(f.begin(), f.end(), out.begin());
    return;
  }
  for (std::size_t i = 0; i < size_; ++i) {
    Complex acc = 0.0;
    for (std::size_t c = 0; c < size_; ++c) acc += haar_[i * size_ + c] * f[c];
    out[i] = acc;
  }
}

const Field& SubspaceBasis::element(std::size_t i) const {
  if (!grid_) throw InvalidArgument("basis was built without a grid");
  return samples_.at(i);
}

std::vector<Complex> SubspaceBasis::Analyze(const Field& f) const {
  if (!(f.grid == grid())) throw InvalidArgument("field and basis grids differ");
  std::vector<Complex> c(size_);
  const double inv = 1.0 / static_cast<double>(f.grid.size());
  for (std::size_t i = 0; i < size_; ++i) {
    c[i] = kernels::DotConj(samples_[i].values, f.values) * inv;
  }
  return c;
}

Field SubspaceBasis::Synthesize(std::span<const Complex> c) const {
  if (c.size() != size_) throw DimensionError("coefficient count != dim W");
  Field out(grid());
  for (std::size_t i = 0; i < size_; ++i) {
    if (c[i] != 0.0) kernels::Axpy(c[i], samples_[i].values, out.values);
  }
  return out;
}

Field SubspaceBasis::SynthesizeOn(const TorusGrid& g,
                                  std::span<const Complex> c) const {
  if (c.size() != size_) throw DimensionError("coefficient count != dim W");
  if (g.dim() != spec_.dim) throw DimensionError("grid dimension != d");
  if (spec_.family == Family::kBandlimited) {
    if (2 * spec_.bandwidth >= g.n()) throw BandwidthError("grid too coarse");
    Spectrum s(g);
    for (std::size_t i = 0; i < size_; ++i) s.at(frequency(i)) = c[i];
    return InverseTransform(s);
  }
  const std::vector<Complex> values = CellValues(c);
  Field out(g);
  std::vector<int> j(g.dim());
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    g.NodeAt(idx, j);
    for (std::size_t cc = 0; cc < cells_.size(); ++cc) {
      const Cell& cell = cells_.cells[cc];
      bool inside = true;
      for (int a = 0; a < g.dim() && inside; ++a) {
        const double x = j[a] * g.spacing();
        inside = x >= cell.corner[a] - 1e-12 &&
                 x < cell.corner[a] + cell.sides[a] - 1e-12;
      }
      if (inside) {
        out.values[idx] = values[cc];
        break;
      }
    }
  }
  return out;
}

std::vector<Complex> SubspaceBasis::CellValues(std::span<const Complex> c) const {
  if (!is_piecewise()) throw InvalidArgument("cell values need a piecewise basis");
  if (c.size() != size_) throw DimensionError("coefficient count != dim W");
  std::vector<Complex> b(c.begin(), c.end());
  if (!haar_.empty()) {
    // f-coordinates are H^T c.
    for (std::size_t cc = 0; cc < size_; ++cc) {
      Complex acc = 0.0;
      for (std::size_t i = 0; i < size_; ++i) acc += haar_[i * size_ + cc] * c[i];
      b[cc] = acc;
    }
  }
  for (std::size_t cc = 0; cc < size_; ++cc) {
    b[cc] /= std::sqrt(cells_.cells[cc].Volume());
  }
  return b;
}

std::vector<Complex> SubspaceBasis::FromCellValues(
    std::span<const Complex> v) const {
  if (!is_piecewise()) throw InvalidArgument("cell values need a piecewise basis");
  if (v.size() != size_) throw DimensionError("cell value count != dim W");
  std::vector<Complex> b(size_);
  for (std::size_t cc = 0; cc < size_; ++cc) {
    b[cc] = v[cc] * std::sqrt(cells_.cells[cc].Volume());
  }
  if (haar_.empty()) return b;
  std::vector<Complex> c(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    Complex acc = 0.0;
    for (std::size_t cc = 0; cc < size_; ++cc) acc += haar_[i * size_ + cc] * b[cc];
    c[i] = acc;
  }
  return c;
}

Complex SubspaceBasis::Integrate(std::span<const Complex> c,
                                 const Spectrum& ghat,
                                 std::span<const Complex> w) const {
  const TorusGrid& g = ghat.grid;
  const int d = g.dim();
  const int n = g.n();
  if (d != spec_.dim || static_cast<int>(w.size()) != d) {
    throw DimensionError("Integrate argument dimensions");
  }
  std::vector<int> slot_freq(n);
  for (int s = 0; s < n; ++s) slot_freq[s] = s <= n / 2 ? s : s - n;

  std::vector<std::vector<Complex>> tables(d, std::vector<Complex>(n));
  Complex total = 0.0;
  if (spec_.family == Family::kBandlimited) {
    for (std::size_t i = 0; i < size_; ++i) {
      if (c[i] == 0.0) continue;
      const std::span<const int> j = frequency(i);
      for (int a = 0; a < d; ++a) {
        for (int s = 0; s < n; ++s) {
          tables[a][s] = ExpIntegral1d(
              0.0, 1.0, w[a] + Complex(0.0, 2.0 * kPi * (j[a] + slot_freq[s])));
        }
      }
      total += c[i] * internal::SeparableSum(g, ghat.coeffs, tables);
    }
    return total;
  }
  const std::vector<Complex> values = CellValues(c);
  // Cells of a tensor-like partition share intervals along each axis, so the
  // 1-d tables and the partial contractions over the trailing axes are
  // computed once per distinct interval (suffix).
  std::vector<std::vector<std::pair<double, double>>> intervals(d);
  std::vector<std::vector<int>> cell_iv;
  std::vector<std::size_t> active;
  for (std::size_t cc = 0; cc < cells_.size(); ++cc) {
    if (values[cc] == 0.0) continue;
    const Cell& cell = cells_.cells[cc];
    std::vector<int> iv(d);
    for (int a = 0; a < d; ++a) {
      const std::pair<double, double> key(cell.corner[a], cell.sides[a]);
      auto& list = intervals[a];
      auto it = std::find(list.begin(), list.end(), key);
      iv[a] = static_cast<int>(it - list.begin());
      if (it == list.end()) list.push_back(key);
    }
    cell_iv.push_back(std::move(iv));
    active.push_back(cc);
  }
  std::vector<std::vector<std::vector<Complex>>> axis_tables(d);
  for (int a = 0; a < d; ++a) {
    for (const auto& [corner, side] : intervals[a]) {
      std::vector<Complex> t(n);
      for (int s = 0; s < n; ++s) {
        t[s] = ExpIntegral1d(corner, side, w[a] + Complex(0.0, 2.0 * kPi * slot_freq[s]));
      }
      axis_tables[a].push_back(std::move(t));
    }
  }
  // partial[key] for key = intervals of axes a..d-1: ghat contracted over
  // those axes, n^a entries. Contract the fastest axis first.
  std::map<std::vector<int>, std::vector<Complex>> partial, next;
  std::size_t rows = g.size();
  for (int a = d - 1; a >= 0; --a) {
    rows /= n;
    next.clear();
    for (const std::vector<int>& iv : cell_iv) {
      std::vector<int> key(iv.begin() + a, iv.end());
      if (next.count(key)) continue;
      const std::vector<Complex>& table = axis_tables[a][iv[a]];
      const Complex* in = a == d - 1
                              ? ghat.coeffs.data()
                              : partial.at(std::vector<int>(key.begin() + 1, key.end())).data();
      std::vector<Complex> out(rows);
      for (std::size_t r = 0; r < rows; ++r) {
        Complex acc = 0.0;
        const Complex* row = in + r * n;
        for (int s = 0; s < n; ++s) acc += row[s] * table[s];
        out[r] = acc;
      }
      next.emplace(std::move(key), std::move(out));
    }
    std::swap(partial, next);
  }
  for (std::size_t i = 0; i < active.size(); ++i) {
    total += values[active[i]] * partial.at(cell_iv[i])[0];
  }
  return total;
}

Field ProjectSubspace(const Field& f, const SubspaceBasis& basis) {
  return basis.Synthesize(basis.Analyze(f));
}

}  // namespace cgoinv
