#include "agsp/bands.hpp"

#include <algorithm>
#include <string>

#include "agsp/errors.hpp"

namespace agsp {

const NarrowBand& BandLayout::narrow_by_index(int index) const {
  for (const auto& b : narrow)
    if (b.index == index) return b;
  throw ShapeMismatch("no narrow band with index " + std::to_string(index));
}

std::vector<Site> BandLayout::band_sites(const NarrowBand& b) const {
  Rectangle r{b.col_lo, b.col_hi, 1, grid_height};
  return r.sites();
}

std::vector<Site> BandLayout::band_sites(const WideBand& b) const {
  Rectangle r{b.col_lo, b.col_hi, 1, grid_height};
  return r.sites();
}

BandLayout layout_bands(int w, int h, int m, int t, bool allow_clipped) {
  if (m < 1 || t < 1) throw ShapeMismatch("band layout needs m, t >= 1");
  if (6 * m * t > w && !allow_clipped)
    throw GridTooNarrow("band layout needs 6mt = " + std::to_string(6 * m * t) +
                        " columns but the grid has " + std::to_string(w));
  BandLayout lay;
  lay.grid_width = w;
  lay.grid_height = h;
  lay.m = m;
  lay.t = t;
  lay.clipped = 6 * m * t > w;

  for (int i = 0;; ++i) {
    int lo = std::max(1, 3 * i * t - 2 * t + 1);
    int hi = std::min(w, 3 * i * t + 2 * t);
    if (3 * i * t - 2 * t + 1 > w) break;  // this and later bands are empty
    if (lo > hi) continue;                 // fully clipped (cannot happen)
    lay.narrow.push_back({i, lo, hi});
  }

  const int stride = 6 * m * t;
  const int wide_count = (w + stride - 1) / stride;
  for (int j = 1; j <= wide_count; ++j) {
    WideBand wb;
    wb.index = j;
    wb.col_lo = (j - 1) * stride + 1;
    wb.col_hi = std::min(w, j * stride);
    for (int i = 2 * (j - 1) * m + 1; i < 2 * j * m; i += 2) {
      bool present = false;
      for (const auto& nb : lay.narrow)
        if (nb.index == i) present = true;
      if (present) wb.xi.push_back(i);
    }
    lay.wide.push_back(std::move(wb));
  }

  // Structural invariants; these hold by interval arithmetic and guard the
  // clipped configurations.
  for (size_t k = 0; k < lay.narrow.size(); ++k) {
    const auto& b = lay.narrow[k];
    if (b.width() > 4 * t) throw ShapeMismatch("narrow band wider than 4t");
    if (k + 1 < lay.narrow.size()) {
      const auto& nxt = lay.narrow[k + 1];
      int overlap = std::max(0, b.col_hi - nxt.col_lo + 1);
      if (overlap > t)
        throw ShapeMismatch("adjacent narrow bands overlap by more than t");
    }
    if (k + 2 < lay.narrow.size()) {
      const auto& nxt2 = lay.narrow[k + 2];  // same parity neighbour
      if (b.col_hi >= nxt2.col_lo)
        throw ShapeMismatch("same-parity narrow bands intersect");
    }
  }
  for (size_t k = 0; k < lay.wide.size(); ++k) {
    const auto& wb = lay.wide[k];
    if (k + 1 < lay.wide.size() &&
        wb.col_hi + 1 != lay.wide[k + 1].col_lo)
      throw ShapeMismatch("wide bands do not partition the columns");
    for (int i : wb.xi) {
      const auto& nb = lay.narrow_by_index(i);
      if (nb.col_lo < wb.col_lo || nb.col_hi > wb.col_hi)
        throw ShapeMismatch("odd band escapes its wide band");
    }
  }
  return lay;
}

}  // namespace agsp
