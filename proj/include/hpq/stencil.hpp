#pragma once

// Structured tensor grids with per-axis cyclic flags and second-order
// stencils; shared by the graph solver and the cone machinery.

#include <vector>

#include "hpq/errors.hpp"

namespace hpq {

struct StructuredGrid {
  std::vector<int> dims;
  std::vector<bool> cyclic;
  std::vector<double> spacing;

  int axes() const { return static_cast<int>(dims.size()); }

  int num_nodes() const {
    int n = 1;
    for (int d : dims) n *= d;
    return n;
  }

  int index(const std::vector<int>& coords) const {
    int idx = 0;
    for (int a = 0; a < axes(); ++a) idx = idx * dims[a] + coords[a];
    return idx;
  }

  std::vector<int> coords(int idx) const {
    std::vector<int> c(axes());
    for (int a = axes() - 1; a >= 0; --a) {
      c[a] = idx % dims[a];
      idx /= dims[a];
    }
    return c;
  }

  // Neighbor `step` nodes along `axis`; -1 when off a non-cyclic edge.
  int neighbor(int idx, int axis, int step) const {
    int stride = 1;
    for (int a = axes() - 1; a > axis; --a) stride *= dims[a];
    const int size = dims[axis];
    const int pos = (idx / stride) % size;
    int next = pos + step;
    if (cyclic[axis]) {
      next = ((next % size) + size) % size;
    } else if (next < 0 || next >= size) {
      return -1;
    }
    return idx + (next - pos) * stride;
  }

  bool has_full_stencil(int idx) const {
    for (int a = 0; a < axes(); ++a)
      if (neighbor(idx, a, 1) < 0 || neighbor(idx, a, -1) < 0) return false;
    return true;
  }
};

}  // namespace hpq
