#pragma once

// Exact arithmetic over GMP integers and rationals, with dense matrices and
// the Smith normal form built on top.

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace k3lat {

using Integer = mpz_class;
using Rational = mpq_class;
using IntVector = std::vector<Integer>;
using RatVector = std::vector<Rational>;

/// Raised when an input violates an operation's preconditions.
class LatticeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a bounded search ends without a witness. Distinct from
/// LatticeError so callers can report "not found" rather than "invalid".
class SearchExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Integer abs(const Integer& a) { return a < 0 ? Integer(-a) : a; }

inline Integer gcd(const Integer& a, const Integer& b) {
  Integer g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline Integer lcm(const Integer& a, const Integer& b) {
  Integer l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

// Floor division and non-negative remainder for positive divisors.
inline Integer floor_div(const Integer& a, const Integer& b) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline Integer trunc_div(const Integer& a, const Integer& b) {
  Integer q;
  mpz_tdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline bool divides(const Integer& d, const Integer& a) {
  if (d == 0) return a == 0;
  return mpz_divisible_p(a.get_mpz_t(), d.get_mpz_t()) != 0;
}

inline Integer content(const IntVector& v) {
  Integer g = 0;
  for (const auto& x : v) g = gcd(g, x);
  return g;
}

inline bool is_zero(const IntVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Integer& x) { return x == 0; });
}

inline bool is_zero(const RatVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; });
}

/// Coefficients c with sum c_i * a_i = gcd(a) >= 0.
inline IntVector bezout(const IntVector& a) {
  IntVector coef(a.size());
  Integer g = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    Integer s, t, ng;
    mpz_gcdext(ng.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), g.get_mpz_t(),
               a[i].get_mpz_t());
    for (std::size_t j = 0; j < i; ++j) coef[j] *= s;
    coef[i] = t;
    g = ng;
  }
  return coef;
}

inline RatVector to_rational(const IntVector& v) {
  return RatVector(v.begin(), v.end());
}

inline bool is_integral(const RatVector& v) {
  return std::all_of(v.begin(), v.end(),
                     [](const Rational& x) { return x.get_den() == 1; });
}

inline IntVector to_integral(const RatVector& v) {
  IntVector out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (x.get_den() != 1) throw LatticeError("vector is not integral");
    out.push_back(x.get_num());
  }
  return out;
}

inline Integer common_denominator(const RatVector& v) {
  Integer d = 1;
  for (const auto& x : v) d = lcm(d, x.get_den());
  return d;
}

template <class T>
std::vector<T> scaled(const std::vector<T>& v, const std::type_identity_t<T>& c) {
  std::vector<T> out(v);
  for (auto& x : out) x *= c;
  return out;
}

template <class T>
std::vector<T> added(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) throw LatticeError("vector length mismatch");
  std::vector<T> out(a);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

template <class T>
std::vector<T> subtracted(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) throw LatticeError("vector length mismatch");
  std::vector<T> out(a);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

template <class T>
std::vector<T> negated(const std::vector<T>& a) {
  std::vector<T> out(a);
  for (auto& x : out) x = -x;
  return out;
}

inline IntVector unit_vector(std::size_t n, std::size_t i) {
  IntVector v(n);
  v.at(i) = 1;
  return v;
}

template <class T>
std::string to_string(const std::vector<T>& v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ')';
  return os.str();
}

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static Matrix from_rows(const std::vector<std::vector<T>>& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.front().size() : 0;
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      if (rows[i].size() != c) throw LatticeError("ragged matrix");
      for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  static Matrix from_columns(const std::vector<std::vector<T>>& cols, std::size_t rows) {
    Matrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j].size() != rows) throw LatticeError("column length mismatch");
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<T> row(std::size_t i) const {
    return std::vector<T>(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
  }

  std::vector<T> column(std::size_t j) const {
    std::vector<T> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  void set_column(std::size_t j, const std::vector<T>& c) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c.at(i);
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

  // Products skip zero entries of the left factor: the isometries handled here
  // are identity plus low-rank corrections.
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw LatticeError("matrix dimension mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) {
          const T& bkj = b(k, j);
          if (bkj != 0) c(i, j) += aik * bkj;
        }
      }
    return c;
  }

  friend std::vector<T> operator*(const Matrix& a, const std::vector<T>& x) {
    if (a.cols_ != x.size()) throw LatticeError("matrix/vector dimension mismatch");
    std::vector<T> y(a.rows_);
    for (std::size_t k = 0; k < a.cols_; ++k) {
      if (x[k] == 0) continue;
      for (std::size_t i = 0; i < a.rows_; ++i) {
        const T& aik = a(i, k);
        if (aik != 0) y[i] += aik * x[k];
      }
    }
    return y;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using IntMatrix = Matrix<Integer>;
using RatMatrix = Matrix<Rational>;

inline RatMatrix to_rational(const IntMatrix& m) {
  RatMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = m(i, j);
  return r;
}

inline RatVector mul(const IntMatrix& a, const RatVector& x) {
  if (a.cols() != x.size()) throw LatticeError("matrix/vector dimension mismatch");
  RatVector y(a.rows());
  for (std::size_t k = 0; k < a.cols(); ++k) {
    if (x[k] == 0) continue;
    for (std::size_t i = 0; i < a.rows(); ++i)
      if (a(i, k) != 0) y[i] += a(i, k) * x[k];
  }
  return y;
}

template <class T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) throw LatticeError("vector length mismatch");
  T s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0 && b[i] != 0) s += a[i] * b[i];
  return s;
}

/// Exact determinant by fraction-free (Bareiss) elimination.
inline Integer determinant(IntMatrix m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw LatticeError("determinant of non-square matrix");
  if (n == 0) return 1;
  Integer sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        m(i, j) = m(i, j) * m(k, k) - m(i, k) * m(k, j);
        mpz_divexact(m(i, j).get_mpz_t(), m(i, j).get_mpz_t(), prev.get_mpz_t());
      }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

inline Rational determinant(RatMatrix m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw LatticeError("determinant of non-square matrix");
  Rational det = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && m(p, k) == 0) ++p;
    if (p == n) return 0;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      det = -det;
    }
    det *= m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (m(i, k) == 0) continue;
      Rational f = m(i, k) / m(k, k);
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return det;
}

/// Exact inverse by Gauss-Jordan elimination. Throws on singular input.
inline RatMatrix inverse(RatMatrix a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw LatticeError("inverse of non-square matrix");
  RatMatrix inv = RatMatrix::identity(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a(p, k) == 0) ++p;
    if (p == n) throw LatticeError("matrix is singular");
    if (p != k)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(k, j), a(p, j));
        std::swap(inv(k, j), inv(p, j));
      }
    Rational piv = a(k, k);
    for (std::size_t j = 0; j < n; ++j) {
      a(k, j) /= piv;
      inv(k, j) /= piv;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || a(i, k) == 0) continue;
      Rational f = a(i, k);
      for (std::size_t j = 0; j < n; ++j) {
        if (a(k, j) != 0) a(i, j) -= f * a(k, j);
        if (inv(k, j) != 0) inv(i, j) -= f * inv(k, j);
      }
    }
  }
  return inv;
}

/// P * M * Q = S with S diagonal (successive divisibility, non-negative
/// entries) and P, Q unimodular. Inverses are tracked alongside.
struct SmithForm {
  IntMatrix S, P, P_inv, Q, Q_inv;
  std::size_t rank = 0;

  std::vector<Integer> invariant_factors() const {
    std::vector<Integer> f;
    for (std::size_t i = 0; i < rank; ++i) f.push_back(S(i, i));
    return f;
  }
};

inline SmithForm smith_normal_form(const IntMatrix& m) {
  const std::size_t R = m.rows(), C = m.cols();
  SmithForm sf{m, IntMatrix::identity(R), IntMatrix::identity(R), IntMatrix::identity(C),
               IntMatrix::identity(C), 0};
  IntMatrix& A = sf.S;

  // Row op: row i += k * row j (P tracks it; P_inv gets the inverse column op).
  auto row_add = [&](std::size_t i, std::size_t j, const Integer& k) {
    if (k == 0) return;
    for (std::size_t c = 0; c < C; ++c)
      if (A(j, c) != 0) A(i, c) += k * A(j, c);
    for (std::size_t c = 0; c < R; ++c)
      if (sf.P(j, c) != 0) sf.P(i, c) += k * sf.P(j, c);
    for (std::size_t r = 0; r < R; ++r)
      if (sf.P_inv(r, i) != 0) sf.P_inv(r, j) -= k * sf.P_inv(r, i);
  };
  auto row_swap = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t c = 0; c < C; ++c) std::swap(A(i, c), A(j, c));
    for (std::size_t c = 0; c < R; ++c) std::swap(sf.P(i, c), sf.P(j, c));
    for (std::size_t r = 0; r < R; ++r) std::swap(sf.P_inv(r, i), sf.P_inv(r, j));
  };
  auto row_neg = [&](std::size_t i) {
    for (std::size_t c = 0; c < C; ++c) A(i, c) = -A(i, c);
    for (std::size_t c = 0; c < R; ++c) sf.P(i, c) = -sf.P(i, c);
    for (std::size_t r = 0; r < R; ++r) sf.P_inv(r, i) = -sf.P_inv(r, i);
  };
  // Column op: col i += k * col j.
  auto col_add = [&](std::size_t i, std::size_t j, const Integer& k) {
    if (k == 0) return;
    for (std::size_t r = 0; r < R; ++r)
      if (A(r, j) != 0) A(r, i) += k * A(r, j);
    for (std::size_t r = 0; r < C; ++r)
      if (sf.Q(r, j) != 0) sf.Q(r, i) += k * sf.Q(r, j);
    for (std::size_t c = 0; c < C; ++c)
      if (sf.Q_inv(i, c) != 0) sf.Q_inv(j, c) -= k * sf.Q_inv(i, c);
  };
  auto col_swap = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t r = 0; r < R; ++r) std::swap(A(r, i), A(r, j));
    for (std::size_t r = 0; r < C; ++r) std::swap(sf.Q(r, i), sf.Q(r, j));
    for (std::size_t c = 0; c < C; ++c) std::swap(sf.Q_inv(i, c), sf.Q_inv(j, c));
  };

  std::size_t t = 0;
  for (; t < std::min(R, C); ++t) {
    // Pivot: smallest non-zero entry of the trailing block.
    bool found = false;
    std::size_t pi = t, pj = t;
    for (std::size_t i = t; i < R; ++i)
      for (std::size_t j = t; j < C; ++j)
        if (A(i, j) != 0 && (!found || abs(A(i, j)) < abs(A(pi, pj)))) {
          found = true;
          pi = i;
          pj = j;
        }
    if (!found) break;
    row_swap(t, pi);
    col_swap(t, pj);

    for (;;) {
      bool dirty = false;
      for (std::size_t i = t + 1; i < R; ++i) {
        if (A(i, t) == 0) continue;
        row_add(i, t, -trunc_div(A(i, t), A(t, t)));
        if (A(i, t) != 0) {
          row_swap(t, i);
          dirty = true;
        }
      }
      for (std::size_t j = t + 1; j < C; ++j) {
        if (A(t, j) == 0) continue;
        col_add(j, t, -trunc_div(A(t, j), A(t, t)));
        if (A(t, j) != 0) {
          col_swap(t, j);
          dirty = true;
        }
      }
      if (dirty) continue;
      // Enforce divisibility of the trailing block by the pivot.
      bool fixed = true;
      for (std::size_t i = t + 1; i < R && fixed; ++i)
        for (std::size_t j = t + 1; j < C; ++j)
          if (!divides(A(t, t), A(i, j))) {
            row_add(t, i, 1);
            fixed = false;
            break;
          }
      if (fixed) break;
    }
    if (A(t, t) < 0) row_neg(t);
  }
  sf.rank = t;
  return sf;
}

/// Basis of a sublattice of Z^n given by columns, with an integral left
/// inverse (left_inverse * basis = identity) so coordinates can be recovered.
struct SublatticeBasis {
  IntMatrix basis;
  IntMatrix left_inverse;

  std::size_t ambient_rank() const { return basis.rows(); }
  std::size_t rank() const { return basis.cols(); }

  /// Coordinates of an ambient vector; throws if it is not in the span.
  IntVector coordinates(const IntVector& x) const {
    IntVector c = left_inverse * x;
    if (basis * c != x) throw LatticeError("vector does not lie in the sublattice");
    return c;
  }

  RatVector coordinates(const RatVector& x) const {
    RatVector c = mul(left_inverse, x);
    if (mul(basis, c) != x) throw LatticeError("vector does not lie in the subspace");
    return c;
  }

  IntVector embed(const IntVector& c) const { return basis * c; }
  RatVector embed(const RatVector& c) const { return mul(basis, c); }
};

/// Integer kernel {x : M x = 0}; always a primitive sublattice.
inline SublatticeBasis integer_kernel(const IntMatrix& m) {
  SmithForm sf = smith_normal_form(m);
  const std::size_t n = m.cols(), k = n - sf.rank;
  SublatticeBasis out{IntMatrix(n, k), IntMatrix(k, n)};
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      out.basis(i, j) = sf.Q(i, sf.rank + j);
      out.left_inverse(j, i) = sf.Q_inv(sf.rank + j, i);
    }
  }
  return out;
}

/// Whether x lies in the Z-span of the columns of gens.
inline bool in_lattice(const IntMatrix& gens, const IntVector& x) {
  SmithForm sf = smith_normal_form(gens);
  IntVector z = sf.P * x;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (i < sf.rank) {
      if (!divides(sf.S(i, i), z[i])) return false;
    } else if (z[i] != 0) {
      return false;
    }
  }
  return true;
}

}  // namespace k3lat
