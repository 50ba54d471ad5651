#pragma once

#include <vector>

#include "agsp/grid_hamiltonian.hpp"

namespace agsp {

/// Full-height vertical strip of columns [col_lo, col_hi] (inclusive).
/// Narrow band i covers (3it - 2t, 3it + 2t] clipped to the grid; even and
/// odd indices each form a pairwise disjoint family and neighbours overlap
/// in at most t columns.
struct NarrowBand {
  int index = 0;
  int col_lo = 1, col_hi = 0;
  int width() const { return col_hi - col_lo + 1; }
  bool even() const { return index % 2 == 0; }
};

/// Disjoint strip j covering (6(j-1)mt, 6jmt] clipped to the grid, plus the
/// odd narrow-band indices (2(j-1)m, 2jm) whose bands are nonempty — those
/// bands lie strictly inside this strip.
struct WideBand {
  int index = 1;
  int col_lo = 1, col_hi = 0;
  std::vector<int> xi;
  int width() const { return col_hi - col_lo + 1; }
};

struct BandLayout {
  int grid_width = 0, grid_height = 0;
  int m = 1, t = 1;
  bool clipped = false;  // true when 6mt > grid width
  std::vector<NarrowBand> narrow;  // nonempty bands, ascending index
  std::vector<WideBand> wide;

  int wide_count() const { return static_cast<int>(wide.size()); }
  const NarrowBand& narrow_by_index(int index) const;
  std::vector<Site> band_sites(const NarrowBand& b) const;
  std::vector<Site> band_sites(const WideBand& b) const;
};

/// Lay the bands over a W x h grid. Throws GridTooNarrow when 6mt > W
/// unless allow_clipped is set, in which case bands are clipped at the grid
/// edge (the structural invariants still hold and are checked).
BandLayout layout_bands(int w, int h, int m, int t,
                        bool allow_clipped = false);

}  // namespace agsp
