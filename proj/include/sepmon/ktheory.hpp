// Exact integer linear algebra: Smith/Hermite normal forms, finitely
// generated abelian groups as cokernels, induced homomorphisms and kernels.

#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace sepmon::ktheory {

using Int = boost::multiprecision::cpp_int;

struct IntMatrix {
  long rows = 0;
  long cols = 0;
  std::vector<Int> a;  // row-major

  IntMatrix() = default;
  IntMatrix(long r, long c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}

  Int& at(long i, long j) { return a[static_cast<size_t>(i) * cols + j]; }
  const Int& at(long i, long j) const { return a[static_cast<size_t>(i) * cols + j]; }

  static IntMatrix identity(long n) {
    IntMatrix m(n, n);
    for (long i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  bool operator==(const IntMatrix& o) const {
    return rows == o.rows && cols == o.cols && a == o.a;
  }
};

inline IntMatrix multiply(const IntMatrix& x, const IntMatrix& y) {
  if (x.cols != y.rows) throw std::invalid_argument("matrix dimension mismatch");
  IntMatrix z(x.rows, y.cols);
  for (long i = 0; i < x.rows; ++i)
    for (long k = 0; k < x.cols; ++k) {
      const Int& v = x.at(i, k);
      if (v == 0) continue;
      for (long j = 0; j < y.cols; ++j) z.at(i, j) += v * y.at(k, j);
    }
  return z;
}

inline std::vector<Int> mat_apply(const IntMatrix& m, const std::vector<Int>& x) {
  if (static_cast<long>(x.size()) != m.cols)
    throw std::invalid_argument("vector dimension mismatch");
  std::vector<Int> y(static_cast<size_t>(m.rows));
  for (long i = 0; i < m.rows; ++i) {
    Int s = 0;
    for (long j = 0; j < m.cols; ++j) s += m.at(i, j) * x[static_cast<size_t>(j)];
    y[static_cast<size_t>(i)] = s;
  }
  return y;
}

// Determinant by fraction-free Gaussian elimination (Bareiss).
inline Int determinant(IntMatrix m) {
  if (m.rows != m.cols) throw std::invalid_argument("determinant of non-square matrix");
  long n = m.rows;
  if (n == 0) return 1;
  Int sign = 1, prev = 1;
  for (long k = 0; k < n - 1; ++k) {
    if (m.at(k, k) == 0) {
      long p = -1;
      for (long i = k + 1; i < n; ++i)
        if (m.at(i, k) != 0) { p = i; break; }
      if (p < 0) return 0;
      for (long j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(p, j));
      sign = -sign;
    }
    for (long i = k + 1; i < n; ++i)
      for (long j = k + 1; j < n; ++j)
        m.at(i, j) = (m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j)) / prev;
    prev = m.at(k, k);
  }
  return sign * m.at(n - 1, n - 1);
}

struct SnfResult {
  IntMatrix s;  // diagonal, d1 | d2 | ... , nonnegative
  IntMatrix u;  // unimodular, rows x rows
  IntMatrix v;  // unimodular, cols x cols;  u * a * v == s
};

// Smith normal form with transformation matrices. Pivot selection: minimal
// absolute value among nonzero entries of the working block, ties broken by
// (row, col) position.
inline SnfResult smith_normal_form(const IntMatrix& input) {
  IntMatrix s = input;
  IntMatrix u = IntMatrix::identity(s.rows);
  IntMatrix v = IntMatrix::identity(s.cols);
  const long n = s.rows, m = s.cols;

  auto row_swap = [&](long i, long j) {
    if (i == j) return;
    for (long c = 0; c < m; ++c) std::swap(s.at(i, c), s.at(j, c));
    for (long c = 0; c < n; ++c) std::swap(u.at(i, c), u.at(j, c));
  };
  auto col_swap = [&](long i, long j) {
    if (i == j) return;
    for (long r = 0; r < n; ++r) std::swap(s.at(r, i), s.at(r, j));
    for (long r = 0; r < m; ++r) std::swap(v.at(r, i), v.at(r, j));
  };
  auto row_addmul = [&](long dst, long src, const Int& q) {  // row dst += q * row src
    if (q == 0) return;
    for (long c = 0; c < m; ++c) s.at(dst, c) += q * s.at(src, c);
    for (long c = 0; c < n; ++c) u.at(dst, c) += q * u.at(src, c);
  };
  auto col_addmul = [&](long dst, long src, const Int& q) {
    if (q == 0) return;
    for (long r = 0; r < n; ++r) s.at(r, dst) += q * s.at(r, src);
    for (long r = 0; r < m; ++r) v.at(r, dst) += q * v.at(r, src);
  };
  auto row_negate = [&](long i) {
    for (long c = 0; c < m; ++c) s.at(i, c) = -s.at(i, c);
    for (long c = 0; c < n; ++c) u.at(i, c) = -u.at(i, c);
  };

  long t = 0;
  while (t < n && t < m) {
    // pick pivot
    long pi = -1, pj = -1;
    Int best = 0;
    for (long i = t; i < n; ++i)
      for (long j = t; j < m; ++j) {
        const Int& x = s.at(i, j);
        if (x == 0) continue;
        Int ax = abs(x);
        if (pi < 0 || ax < best) { best = ax; pi = i; pj = j; }
      }
    if (pi < 0) break;  // block is zero
    row_swap(t, pi);
    col_swap(t, pj);
    if (s.at(t, t) < 0) row_negate(t);

    bool dirty = false;
    for (long i = t + 1; i < n; ++i) {
      if (s.at(i, t) == 0) continue;
      Int q = s.at(i, t) / s.at(t, t);
      // floor-style quotient keeps remainders in [0, pivot)
      if (s.at(i, t) - q * s.at(t, t) < 0) q -= 1;
      row_addmul(i, t, -q);
      if (s.at(i, t) != 0) dirty = true;
    }
    for (long j = t + 1; j < m; ++j) {
      if (s.at(t, j) == 0) continue;
      Int q = s.at(t, j) / s.at(t, t);
      if (s.at(t, j) - q * s.at(t, t) < 0) q -= 1;
      col_addmul(j, t, -q);
      if (s.at(t, j) != 0) dirty = true;
    }
    if (dirty) continue;  // re-pick a smaller pivot

    // pivot divides everything in its row/column; enforce divisibility of
    // the remaining block
    bool fixed = false;
    for (long i = t + 1; i < n && !fixed; ++i)
      for (long j = t + 1; j < m && !fixed; ++j)
        if (s.at(i, j) % s.at(t, t) != 0) {
          row_addmul(t, i, 1);
          fixed = true;
        }
    if (fixed) continue;
    ++t;
  }
  return {std::move(s), std::move(u), std::move(v)};
}

// Column-style Hermite normal form of the lattice spanned by the columns of
// the input. Zero columns are dropped; the result is the canonical basis of
// the lattice (pivots positive, entries to the right of a pivot reduced into
// [0, pivot)).
inline IntMatrix hermite_column_basis(const IntMatrix& input) {
  long n = input.rows;
  std::vector<std::vector<Int>> cols;
  for (long j = 0; j < input.cols; ++j) {
    std::vector<Int> c(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) c[static_cast<size_t>(i)] = input.at(i, j);
    cols.push_back(std::move(c));
  }
  size_t piv = 0;
  for (long r = 0; r < n && piv < cols.size(); ++r) {
    while (true) {
      long cand = -1;
      Int best = 0;
      for (size_t j = piv; j < cols.size(); ++j) {
        const Int& x = cols[j][static_cast<size_t>(r)];
        if (x == 0) continue;
        Int ax = abs(x);
        if (cand < 0 || ax < best) { best = ax; cand = static_cast<long>(j); }
      }
      if (cand < 0) break;
      std::swap(cols[piv], cols[static_cast<size_t>(cand)]);
      if (cols[piv][static_cast<size_t>(r)] < 0)
        for (auto& x : cols[piv]) x = -x;
      bool dirty = false;
      for (size_t j = piv + 1; j < cols.size(); ++j) {
        const Int& x = cols[j][static_cast<size_t>(r)];
        if (x == 0) continue;
        Int q = x / cols[piv][static_cast<size_t>(r)];
        if (x - q * cols[piv][static_cast<size_t>(r)] < 0) q -= 1;
        for (long i = 0; i < n; ++i)
          cols[j][static_cast<size_t>(i)] -= q * cols[piv][static_cast<size_t>(i)];
        if (cols[j][static_cast<size_t>(r)] != 0) dirty = true;
      }
      if (!dirty) break;
    }
    if (cols[piv][static_cast<size_t>(r)] != 0) {
      // reduce earlier pivot columns at this row into [0, pivot)
      for (size_t j = 0; j < piv; ++j) {
        const Int& x = cols[j][static_cast<size_t>(r)];
        Int q = x / cols[piv][static_cast<size_t>(r)];
        if (x - q * cols[piv][static_cast<size_t>(r)] < 0) q -= 1;
        if (q == 0) continue;
        for (long i = 0; i < n; ++i)
          cols[j][static_cast<size_t>(i)] -= q * cols[piv][static_cast<size_t>(i)];
      }
      ++piv;
    }
  }
  IntMatrix out(n, static_cast<long>(piv));
  for (size_t j = 0; j < piv; ++j)
    for (long i = 0; i < n; ++i) out.at(i, static_cast<long>(j)) = cols[j][static_cast<size_t>(i)];
  return out;
}

inline bool same_column_lattice(const IntMatrix& a, const IntMatrix& b) {
  return hermite_column_basis(a) == hermite_column_basis(b);
}

// Finitely generated abelian group Z^n / L, where L is the column lattice of
// a relation matrix. Canonical coordinates are (torsion..., free...) with the
// projection matrix mapping the generator lattice onto them; torsion
// coordinates are understood mod their invariant factor.
struct FgAbelianGroup {
  long num_generators = 0;
  long free_rank = 0;
  std::vector<Int> torsion;  // invariant factors d1 | d2 | ..., each >= 2
  IntMatrix projection;      // (|torsion| + free_rank) x num_generators
  IntMatrix relations;       // the presenting relation matrix (columns)

  long canonical_dim() const { return static_cast<long>(torsion.size()) + free_rank; }

  // Image of a generator-lattice vector in canonical coordinates, torsion
  // coordinates normalized into [0, d).
  std::vector<Int> image(const std::vector<Int>& x) const {
    std::vector<Int> y = mat_apply(projection, x);
    for (size_t i = 0; i < torsion.size(); ++i) {
      Int& c = y[i];
      c %= torsion[i];
      if (c < 0) c += torsion[i];
    }
    return y;
  }
};

// relations: num_generators x num_relations matrix whose columns span the
// relation lattice.
inline FgAbelianGroup cokernel(const IntMatrix& relations) {
  FgAbelianGroup g;
  g.num_generators = relations.rows;
  g.relations = relations;
  SnfResult snf = smith_normal_form(relations);
  const long n = relations.rows;
  long r = std::min(n, relations.cols);
  std::vector<Int> diag(static_cast<size_t>(n), 0);
  for (long i = 0; i < r; ++i) diag[static_cast<size_t>(i)] = snf.s.at(i, i);
  // rows of U with d == 1 are killed; d >= 2 give torsion; d == 0 give free
  std::vector<long> torsion_rows, free_rows;
  for (long i = 0; i < n; ++i) {
    if (diag[static_cast<size_t>(i)] == 1) continue;
    if (diag[static_cast<size_t>(i)] == 0)
      free_rows.push_back(i);
    else
      torsion_rows.push_back(i);
  }
  g.free_rank = static_cast<long>(free_rows.size());
  for (long i : torsion_rows) g.torsion.push_back(diag[static_cast<size_t>(i)]);
  g.projection = IntMatrix(static_cast<long>(torsion_rows.size()) + g.free_rank, n);
  long row = 0;
  for (long i : torsion_rows) {
    for (long j = 0; j < n; ++j) g.projection.at(row, j) = snf.u.at(i, j);
    ++row;
  }
  for (long i : free_rows) {
    for (long j = 0; j < n; ++j) g.projection.at(row, j) = snf.u.at(i, j);
    ++row;
  }
  return g;
}

// Homomorphism between presented groups, induced by a generator-lattice map.
struct GroupHom {
  const FgAbelianGroup* src = nullptr;
  const FgAbelianGroup* dst = nullptr;
  IntMatrix generator_matrix;  // dst.num_generators x src.num_generators
};

// Lattice membership: is x in the column lattice of basis?
inline bool in_column_lattice(const IntMatrix& basis, const std::vector<Int>& x) {
  IntMatrix h = hermite_column_basis(basis);
  std::vector<Int> r = x;
  long n = h.rows;
  long j = 0;
  for (long i = 0; i < n && j < h.cols; ++i) {
    if (h.at(i, j) == 0) continue;
    Int& ri = r[static_cast<size_t>(i)];
    if (ri % h.at(i, j) != 0) return false;
    Int q = ri / h.at(i, j);
    for (long k = 0; k < n; ++k) r[static_cast<size_t>(k)] -= q * h.at(k, j);
    ++j;
  }
  for (const Int& v : r)
    if (v != 0) return false;
  return true;
}

class IllDefinedAtGroupLevel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Checks that the generator map carries the source relation lattice into the
// target relation lattice, i.e. descends to the quotients.
inline GroupHom induced_group_hom(const FgAbelianGroup& src, const FgAbelianGroup& dst,
                                  const IntMatrix& generator_matrix) {
  if (generator_matrix.cols != src.num_generators || generator_matrix.rows != dst.num_generators)
    throw std::invalid_argument("generator matrix dimension mismatch");
  for (long j = 0; j < src.relations.cols; ++j) {
    std::vector<Int> rel(static_cast<size_t>(src.relations.rows));
    for (long i = 0; i < src.relations.rows; ++i) rel[static_cast<size_t>(i)] = src.relations.at(i, j);
    std::vector<Int> img = mat_apply(generator_matrix, rel);
    if (!in_column_lattice(dst.relations, img))
      throw IllDefinedAtGroupLevel("relation column " + std::to_string(j) +
                                   " does not map into the target relation lattice");
  }
  return GroupHom{&src, &dst, generator_matrix};
}

// Reduce a set of subgroup generators (in canonical coordinates of g) to a
// canonical Hermite basis, working modulo the torsion relations d_i e_i.
inline IntMatrix canonical_subgroup_basis(const FgAbelianGroup& g, const IntMatrix& generators) {
  long d = g.canonical_dim();
  if (generators.rows != d) throw std::invalid_argument("subgroup generator dimension mismatch");
  long nt = static_cast<long>(g.torsion.size());
  IntMatrix stacked(d, generators.cols + nt);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < generators.cols; ++j) stacked.at(i, j) = generators.at(i, j);
  for (long i = 0; i < nt; ++i) stacked.at(i, generators.cols + i) = g.torsion[static_cast<size_t>(i)];
  IntMatrix h = hermite_column_basis(stacked);
  // drop columns that are pure torsion relations (present in every subgroup)
  IntMatrix base(d, nt);
  for (long i = 0; i < nt; ++i) base.at(i, i) = g.torsion[static_cast<size_t>(i)];
  IntMatrix hb = hermite_column_basis(base);
  if (h == hb) return IntMatrix(d, 0);  // trivial subgroup
  return h;
}

inline bool same_subgroup(const FgAbelianGroup& g, const IntMatrix& gens_a, const IntMatrix& gens_b) {
  return canonical_subgroup_basis(g, gens_a) == canonical_subgroup_basis(g, gens_b);
}

// Generators of ker(h) as columns in the *canonical coordinates* of the
// source group, Hermite-reduced. Computed as the preimage lattice of the
// target relation lattice.
inline IntMatrix kernel(const GroupHom& h) {
  const FgAbelianGroup& src = *h.src;
  const FgAbelianGroup& dst = *h.dst;
  long n = src.num_generators;
  long k = dst.relations.cols;
  // solve A x = R y over Z: kernel of [A | -R] : Z^{n+k} -> Z^m, x-part
  IntMatrix big(dst.num_generators, n + k);
  for (long i = 0; i < dst.num_generators; ++i) {
    for (long j = 0; j < n; ++j) big.at(i, j) = h.generator_matrix.at(i, j);
    for (long j = 0; j < k; ++j) big.at(i, n + j) = -dst.relations.at(i, j);
  }
  SnfResult snf = smith_normal_form(big);
  // kernel of big = V * (columns of V past rank of S)
  long rank = 0;
  long rmax = std::min(big.rows, big.cols);
  for (long i = 0; i < rmax; ++i)
    if (snf.s.at(i, i) != 0) ++rank;
  long kerdim = big.cols - rank;
  IntMatrix pre(n, kerdim);
  for (long j = 0; j < kerdim; ++j)
    for (long i = 0; i < n; ++i) pre.at(i, j) = snf.v.at(i, rank + j);
  // also include the source relation lattice (maps to zero in the quotient)
  IntMatrix all(n, kerdim + src.relations.cols);
  for (long j = 0; j < kerdim; ++j)
    for (long i = 0; i < n; ++i) all.at(i, j) = pre.at(i, j);
  for (long j = 0; j < src.relations.cols; ++j)
    for (long i = 0; i < n; ++i) all.at(i, kerdim + j) = src.relations.at(i, j);
  // push generators to canonical coordinates and reduce
  IntMatrix canon = multiply(src.projection, all);
  return canonical_subgroup_basis(src, canon);
}

}  // namespace sepmon::ktheory
