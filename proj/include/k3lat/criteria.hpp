#pragma once

// Arithmetic criteria on Mukai vectors (r, kH, s) of a K3 surface whose Picard
// group is ZH with H^2 = 2d. The witness searches built on them live here too.

#include <optional>
#include <string>

#include "k3lat/lattice.hpp"

namespace k3lat {

/// gcd((r^2 - 1) s, k) == 1.
inline bool gcd_criterion(const Integer& r, const Integer& k, const Integer& s) {
  return gcd((r * r - 1) * s, k) == 1;
}

/// e^{tH}(r, k, s) = (r, k + r t, s + 2 k t d + r t^2 d).
inline std::array<Integer, 3> shift_triple(const std::array<Integer, 3>& w, const Integer& t, const Integer& d) {
  const auto& [r, k, s] = w;
  return {r, k + r * t, s + 2 * k * t * d + r * t * t * d};
}

inline bool t_condition(const Integer& r, const Integer& k, const Integer& s, const Integer& d, const Integer& t) {
  auto [r2, k2, s2] = shift_triple({r, k, s}, t, d);
  return gcd_criterion(r2, k2, s2);
}

struct FindTResult {
  std::optional<Integer> t;
  long scanned = 0;
  std::string diagnostic;
};

/// Smallest |t| <= bound (order 0, 1, -1, 2, -2, ...) passing the shifted gcd test.
inline FindTResult find_t(const Integer& r, const Integer& k, const Integer& s, const Integer& d, long bound) {
  FindTResult out;
  if (k * k * d - r * s <= 0) throw LatticeError("find_t: k^2 d - r s must be positive");
  if (abs(r) == 1) throw LatticeError("find_t: r = +-1 is handled by the birational branch");
  for (long a = 0; a <= bound; ++a) {
    for (long sign : {1L, -1L}) {
      if (a == 0 && sign == -1) continue;
      ++out.scanned;
      Integer t = a * sign;
      if (t_condition(r, k, s, d, t)) {
        out.t = t;
        return out;
      }
    }
  }
  out.diagnostic = "no t with |t| <= " + std::to_string(bound) + " satisfies the gcd condition";
  if (r * s == k * k * d) out.diagnostic += "; input has r s = k^2 d, so k^2 d - r s = 0";
  return out;
}

/// gcd(r, s + k m + r k^2 g2 / 2) == 1 for the smallest |k| <= bound.
inline std::optional<Integer> select_k(const Integer& r, const Integer& m, const Integer& s, const Integer& gamma2,
                                       long bound = 100000) {
  if (gcd(gcd(r, m), s) != 1) throw LatticeError("select_k: (r, m, s) is not primitive");
  if (!divides(2, gamma2)) throw LatticeError("select_k: gamma^2 must be even");
  for (long a = 0; a <= bound; ++a)
    for (long sign : {1L, -1L}) {
      if (a == 0 && sign == -1) continue;
      Integer k = a * sign;
      Integer sk = s + k * m + r * k * k * (gamma2 / 2);
      if (gcd(r, sk) == 1) return k;
    }
  return std::nullopt;
}

/// A vector gamma of the lattice with <beta, gamma> = 1, via Smith form.
inline IntVector select_gamma(const IntegralLattice& l, const IntVector& beta) {
  if (is_zero(beta) || divisibility(l, beta) != 1) throw LatticeError("select_gamma: div(beta) != 1, no solution");
  IntVector gb = l.gram_times(beta);
  IntMatrix row = IntMatrix::from_rows({gb});
  SmithForm sf = smith_normal_form(row);
  // P row Q = [1 0 ... 0]  =>  gamma = Q e_0 * P(0,0).
  IntVector gamma = scaled(sf.Q.column(0), sf.P(0, 0));
  IntVector alt = bezout(gb);
  auto norm1 = [](const IntVector& v) {
    Integer s = 0;
    for (const auto& c : v) s += abs(c);
    return s;
  };
  if (norm1(alt) < norm1(gamma)) gamma = alt;
  if (l.inner(beta, gamma) != 1) throw LatticeError("select_gamma: solution failed verification");
  return gamma;
}

/// gamma inside the sublattice spanned by sub (ambient coordinates returned)
/// with <beta, gamma> = 1; beta itself may lie outside sub.
inline IntVector select_gamma(const IntegralLattice& l, const SublatticeBasis& sub, const IntVector& beta) {
  IntVector gb = l.gram_times(beta);
  IntVector pairings(sub.rank());
  for (std::size_t j = 0; j < sub.rank(); ++j) pairings[j] = dot(sub.basis.column(j), gb);
  if (content(pairings) != 1) throw LatticeError("select_gamma: beta has no unit pairing with the sublattice");
  IntVector gamma = sub.embed(bezout(pairings));
  if (l.inner(beta, gamma) != 1) throw LatticeError("select_gamma: solution failed verification");
  return gamma;
}

}  // namespace k3lat
