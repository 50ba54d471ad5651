#include "agsp/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <sstream>

#include "agsp/errors.hpp"
#include "agsp/mpo.hpp"

namespace agsp {

namespace {

long ipow_checked(long base, int e, long cap, const char* what) {
  long r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > cap / base) throw CapExceeded(std::string(what) + " exceeds cap");
    r *= base;
  }
  return r;
}

void append_power(std::ostringstream& out, char name, int pow) {
  if (pow == 0) return;
  out << name;
  if (pow != 1) out << '^' << pow;
}

}  // namespace

std::string PauliWord::label() const {
  if (factors.empty()) return "I";
  std::ostringstream out;
  bool first = true;
  for (const auto& f : factors) {
    if (!first) out << '*';
    first = false;
    append_power(out, 'X', f.x_pow);
    append_power(out, 'Z', f.z_pow);
    out << '(' << f.site.x << ',' << f.site.y << ')';
  }
  return out.str();
}

Matrix clock_shift_matrix(int q, int x_pow, int z_pow) {
  if (q < 2) throw ShapeMismatch("clock/shift matrices need q >= 2");
  const int a = ((x_pow % q) + q) % q;
  const int b = ((z_pow % q) + q) % q;
  Matrix m = Matrix::Zero(q, q);
  const double step = 2.0 * std::numbers::pi / q;
  for (int j = 0; j < q; ++j) {
    m((j + a) % q, j) = std::polar(1.0, step * j * b);
  }
  return m;
}

PauliTable pauli_table(const SubspaceMps& z, int height, int q, int k,
                       const std::vector<Site>& site_filter, int k_cap,
                       long entry_cap) {
  if (height < 1 || q < 2) throw ShapeMismatch("pauli_table needs h >= 1, q >= 2");
  if (k < 0) throw ShapeMismatch("word support bound must be non-negative");
  if (k > k_cap) {
    throw CapExceeded("word support " + std::to_string(k) +
                      " exceeds the configured cap " + std::to_string(k_cap));
  }
  const int w = z.width();
  const long col_dim = ipow_checked(q, height, 1L << 30, "column dimension");
  if (w < 1 || z.phys_dim(0) != col_dim) {
    throw ShapeMismatch("subspace column dimension does not match q^h");
  }

  std::vector<Site> sites;
  if (site_filter.empty()) {
    for (int x = 1; x <= w; ++x) {
      for (int y = 1; y <= height; ++y) sites.push_back({x, y});
    }
  } else {
    sites = site_filter;
    for (const auto& s : sites) {
      if (s.x < 1 || s.x > w || s.y < 1 || s.y > height) {
        throw ShapeMismatch("site filter entry outside the grid");
      }
    }
    std::sort(sites.begin(), sites.end(), [&](const Site& a, const Site& b) {
      return site_position(a, height) < site_position(b, height);
    });
    sites.erase(std::unique(sites.begin(), sites.end(),
                            [&](const Site& a, const Site& b) {
                              return site_position(a, height) ==
                                     site_position(b, height);
                            }),
                sites.end());
  }

  SubspaceMps basis = z;
  if (!basis.isometry) orthonormalize(basis);

  PauliTable table;
  table.width = w;
  table.height = height;
  table.q = q;
  table.k = k;
  table.dim = basis.deg_dim();

  // Enumerate words: identity, then support size 1..k, site combinations in
  // lexicographic order, exponent tuples with the first site most significant.
  table.words.push_back(PauliWord{});
  const int n = static_cast<int>(sites.size());
  const int per_site = q * q - 1;
  std::vector<int> combo;
  std::vector<int> expo;
  auto emit_exponents = [&](auto&& self, int depth) -> void {
    if (depth == static_cast<int>(combo.size())) {
      PauliWord word;
      for (size_t i = 0; i < combo.size(); ++i) {
        const int code = expo[i];  // 1..q^2-1, code = a*q + b
        word.factors.push_back(
            PauliFactor{sites[combo[i]], code / q, code % q});
      }
      table.words.push_back(std::move(word));
      return;
    }
    for (int code = 1; code <= per_site; ++code) {
      expo[depth] = code;
      self(self, depth + 1);
    }
  };
  auto emit_combos = [&](auto&& self, int start, int remaining) -> void {
    if (remaining == 0) {
      expo.assign(combo.size(), 0);
      emit_exponents(emit_exponents, 0);
      return;
    }
    for (int i = start; i + remaining <= n; ++i) {
      combo.push_back(i);
      self(self, i + 1, remaining - 1);
      combo.pop_back();
    }
  };
  for (int s = 1; s <= std::min(k, n); ++s) emit_combos(emit_combos, 0, s);

  const long n_words = static_cast<long>(table.words.size());
  if (table.dim > 0 && n_words > entry_cap / (table.dim * table.dim)) {
    throw CapExceeded("pauli table would hold " + std::to_string(n_words) +
                      " words of " + std::to_string(table.dim * table.dim) +
                      " entries each");
  }

  table.entries.reserve(table.words.size());
  for (const auto& word : table.words) {
    if (word.factors.empty()) {
      table.entries.push_back(mps_overlap(basis, basis));
      continue;
    }
    std::vector<LocalOperator> factors;
    factors.reserve(word.factors.size());
    for (const auto& f : word.factors) {
      factors.push_back(
          LocalOperator{{f.site}, clock_shift_matrix(q, f.x_pow, f.z_pow)});
    }
    table.entries.push_back(contract_expectation(basis, factors, height, q));
  }
  return table;
}

std::vector<int> read_assignment(const PauliTable& table) {
  if (table.dim < 1) throw ShapeMismatch("assignment decoding needs dim >= 1");
  if (table.k < 1) throw ShapeMismatch("assignment decoding needs k >= 1");
  const int q = table.q;

  // Locate the single-site Z^b entries used by the decoder.
  std::map<std::pair<long, int>, const Matrix*> clock;
  for (size_t wi = 0; wi < table.words.size(); ++wi) {
    const auto& word = table.words[wi];
    if (word.factors.size() != 1) continue;
    const auto& f = word.factors.front();
    if (f.x_pow != 0) continue;
    clock[{site_position(f.site, table.height), f.z_pow}] =
        &table.entries[wi];
  }

  const double step = 2.0 * std::numbers::pi / q;
  std::vector<int> digits(static_cast<size_t>(table.width) * table.height, 0);
  for (int x = 1; x <= table.width; ++x) {
    for (int y = 1; y <= table.height; ++y) {
      const long pos = site_position({x, y}, table.height);
      std::vector<Complex> moments(q, Complex(1.0, 0.0));
      for (int b = 1; b < q; ++b) {
        auto it = clock.find({pos, b});
        if (it == clock.end()) {
          throw ShapeMismatch("table lacks the clock words at site (" +
                              std::to_string(x) + "," + std::to_string(y) +
                              ")");
        }
        moments[b] = (*it->second)(0, 0);
      }
      // Inverse Fourier transform of the clock moments estimates the
      // probability of each digit; for q = 2 this is (1 +- <Z>)/2.
      double best = -1.0, second = -1.0;
      int best_digit = 0;
      for (int c = 0; c < q; ++c) {
        Complex p = 0.0;
        for (int b = 0; b < q; ++b) {
          p += std::polar(1.0, -step * c * b) * moments[b];
        }
        const double prob = p.real() / q;
        if (prob > best) {
          second = best;
          best = prob;
          best_digit = c;
        } else if (prob > second) {
          second = prob;
        }
      }
      if (best - second < 0.1) {
        throw AmbiguousSign("digit at site (" + std::to_string(x) + "," +
                            std::to_string(y) + ") is ambiguous: top " +
                            std::to_string(best) + " vs " +
                            std::to_string(second));
      }
      digits[static_cast<size_t>(pos)] = best_digit;
    }
  }
  return digits;
}

}  // namespace agsp
