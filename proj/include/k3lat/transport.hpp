#pragma once

// Constructive orbit moves for primitive vectors: reduction to a normal form
// by transvection words, and transport of vector pairs.

#include <deque>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "k3lat/isometry.hpp"

namespace k3lat {

struct Reduction {
  Word word;          // word(x) == canonical
  IntVector canonical;
  Integer div;
};

namespace detail {

/// Records generator moves in the two frames and keeps the running image of x.
class Reducer {
 public:
  Reducer(const IntegralLattice& l, Frame f1, Frame f2, IntVector x)
      : l_(l), f1_(f1), f2_(f2), x_(std::move(x)) {}

  // Z = [[a1, a2], [b2, -b1]] in the coordinates of the two frames.
  Integer z(int i, int j) const {
    if (i == 0) return j == 0 ? x_[f1_.e] : x_[f2_.e];
    return j == 0 ? x_[f2_.f] : Integer(-x_[f1_.f]);
  }

  void row1_add_row0(const Integer& k) { push(GenKind::Exp, f1_, f2_.f, k); }
  void row0_add_row1(const Integer& k) { push(GenKind::Eichler, f1_, f2_.e, k); }
  void col1_add_col0(const Integer& k) { push(GenKind::Exp, f1_, f2_.e, k); }
  void col0_add_col1(const Integer& k) { push(GenKind::Eichler, f1_, f2_.f, k); }

  void rotate_rows() {
    row0_add_row1(1);
    row1_add_row0(-1);
    row0_add_row1(1);
  }
  void rotate_cols() {
    col0_add_col1(1);
    col1_add_col0(-1);
    col0_add_col1(1);
  }

  /// Brings Z to diag(g, h) with g >= 0 and g | h.
  void diagonalize() {
    for (int guard = 0; guard < 100000; ++guard) {
      while (z(0, 1) != 0) {
        if (z(0, 0) == 0) {
          rotate_cols();
          continue;
        }
        col1_add_col0(-trunc_div(z(0, 1), z(0, 0)));
        if (z(0, 1) != 0) rotate_cols();
      }
      while (z(1, 0) != 0) {
        if (z(0, 0) == 0) {
          rotate_rows();
          continue;
        }
        row1_add_row0(-trunc_div(z(1, 0), z(0, 0)));
        if (z(1, 0) != 0) rotate_rows();
      }
      if (z(0, 1) != 0) continue;
      if (!divides(z(0, 0), z(1, 1))) {
        row0_add_row1(1);
        continue;
      }
      if (z(0, 0) < 0) {
        rotate_rows();
        rotate_rows();
      }
      return;
    }
    throw SearchExhausted("Euclid loop did not terminate");
  }

  void push(GenKind kind, Frame fr, std::size_t coord, const Integer& k) {
    if (k == 0) return;
    RatVector v(l_.rank());
    v[coord] = k;
    push(GeneratorTag{kind, fr, std::move(v)});
  }

  void push(GeneratorTag t) {
    x_ = to_integral(apply_tag(l_, t, to_rational(x_)));
    word_.push_back(std::move(t));
  }

  const IntVector& x() const { return x_; }
  Word& word() { return word_; }

 private:
  const IntegralLattice& l_;
  Frame f1_, f2_;
  IntVector x_;
  Word word_;
};

}  // namespace detail

/// Moves a primitive x to d*e1 + b*f1 + m with m reduced modulo d, where
/// d = div(x). For d = 1 the result is e1 - (x^2/2) f1. The returned word is
/// checked by replay before returning.
inline Reduction eichler_reduce(const IntegralLattice& l, const IntVector& x, Frame f1, Frame f2) {
  if (!is_hyperbolic_frame(l, f1) || !is_hyperbolic_frame(l, f2))
    throw LatticeError("eichler_reduce needs two marked hyperbolic frames");
  if (x.size() != l.rank()) throw LatticeError("vector length does not match lattice rank");
  if (!is_primitive(x)) throw LatticeError("eichler_reduce needs a primitive vector");

  const std::size_t n = l.rank();
  auto m_part = [&](const IntVector& y) {
    IntVector m = y;
    m[f1.e] = m[f1.f] = m[f2.e] = m[f2.f] = 0;
    return m;
  };

  detail::Reducer red(l, f1, f2, x);
  red.diagonalize();

  IntVector m = m_part(red.x());
  if (!is_zero(m)) {
    IntVector gm = l.gram_times(m);
    Integer dm = content(gm);
    if (!divides(red.z(0, 0), dm)) {
      IntVector mu = bezout(gm);
      red.push(GeneratorTag{GenKind::Exp, f2, to_rational(mu)});
      red.diagonalize();
    }
  }
  const Integer d = red.z(0, 0);
  if (d == 0) throw LatticeError("vector has no non-zero pairing with the frames");

  m = m_part(red.x());
  if (!is_zero(m)) {
    RatVector mu(n);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (m[i] == 0) continue;
      Integer q = floor_div(m[i], d);
      if (q != 0) {
        mu[i] = -q;
        any = true;
      }
    }
    if (any) red.push(GeneratorTag{GenKind::Exp, f1, mu});
  }

  Reduction out{red.word(), red.x(), divisibility(l, x)};
  if (apply_word(l, out.word, x) != out.canonical) throw LatticeError("reduction word failed replay");
  return out;
}

inline Reduction eichler_reduce(const IntegralLattice& l, const IntVector& x) {
  auto frames = hyperbolic_frames(l);
  if (frames.size() < 2) throw LatticeError("lattice has fewer than two hyperbolic frames");
  return eichler_reduce(l, x, frames[0], frames[1]);
}

// ---------------------------------------------------------------------------

struct TransportConfig {
  long max_steps = 200000;  // node budget for the search fallback
};

struct TransportResult {
  bool ok = false;
  std::optional<Isometry> map;
  std::string method;       // "identity", "constructive", "search"
  std::string diagnostic;   // populated on failure
};

namespace detail {

/// Rewrites a word on the sublattice with basis `basis` into a word on l.
inline Word lift_word(const Word& w, const IntMatrix& basis) {
  Word out;
  for (const auto& t : w) {
    GeneratorTag lt;
    lt.kind = t.kind;
    auto ambient_index = [&](std::size_t j) {
      for (std::size_t i = 0; i < basis.rows(); ++i)
        if (basis(i, j) == 1) {
          bool unit = true;
          for (std::size_t k = 0; k < basis.rows() && unit; ++k)
            if (k != i && basis(k, j) != 0) unit = false;
          if (unit) return i;
        }
      throw LatticeError("frame vector is not an ambient basis vector");
    };
    if (t.kind != GenKind::Negate && t.kind != GenKind::Reflection) lt.frame = {ambient_index(t.frame.e), ambient_index(t.frame.f)};
    if (!t.vec.empty()) lt.vec = mul(basis, t.vec);
    out.push_back(std::move(lt));
  }
  return out;
}

using Pair = std::pair<IntVector, IntVector>;

inline Integer max_abs(const IntVector& v) {
  Integer m = 0;
  for (const auto& c : v)
    if (abs(c) > m) m = abs(c);
  return m;
}

/// Unit Exp/Eichler moves in the first two frames.
inline Word basic_generators(const IntegralLattice& l) {
  auto frames = hyperbolic_frames(l);
  Word gens;
  for (std::size_t a = 0; a < std::min<std::size_t>(2, frames.size()); ++a) {
    const Frame fr = frames[a];
    for (std::size_t j = 0; j < l.rank(); ++j) {
      if (j == fr.e || j == fr.f) continue;
      for (GenKind k : {GenKind::Exp, GenKind::Eichler})
        for (int s : {1, -1}) {
          RatVector v(l.rank());
          v[j] = s;
          gens.push_back({k, fr, std::move(v)});
        }
    }
  }
  return gens;
}

/// Bidirectional breadth-first search for a word sending `from` to `to`,
/// restricted to a coordinate box.
inline std::optional<Word> pair_search(const IntegralLattice& l, const Pair& from, const Pair& to, long max_steps,
                                       std::string& why) {
  const Word gens = basic_generators(l);
  if (gens.empty()) {
    why = "no hyperbolic frames available for the search";
    return std::nullopt;
  }
  const Integer box = std::max({max_abs(from.first), max_abs(from.second), max_abs(to.first), max_abs(to.second)}) + 2;
  auto key = [](const Pair& p) { return to_string(p.first) + "|" + to_string(p.second); };
  struct Node {
    Pair p;
    Word w;
  };
  std::map<std::string, Word> seen[2];
  std::deque<Node> frontier[2];
  seen[0][key(from)] = {};
  seen[1][key(to)] = {};
  frontier[0].push_back({from, {}});
  frontier[1].push_back({to, {}});
  if (key(from) == key(to)) return Word{};
  long steps = 0;
  while (!frontier[0].empty() || !frontier[1].empty()) {
    const int side = frontier[0].size() <= frontier[1].size() && !frontier[0].empty() ? 0 : (frontier[1].empty() ? 0 : 1);
    Node cur = std::move(frontier[side].front());
    frontier[side].pop_front();
    for (const auto& g : gens) {
      if (++steps > max_steps) {
        why = "search budget of " + std::to_string(max_steps) + " steps exhausted";
        return std::nullopt;
      }
      Pair np{to_integral(apply_tag(l, g, to_rational(cur.p.first))), to_integral(apply_tag(l, g, to_rational(cur.p.second)))};
      if (max_abs(np.first) > box || max_abs(np.second) > box) continue;
      std::string k = key(np);
      if (seen[side].count(k)) continue;
      Word nw = cur.w;
      nw.push_back(g);
      auto hit = seen[1 - side].find(k);
      if (hit != seen[1 - side].end()) {
        const Word& fw = side == 0 ? nw : hit->second;
        const Word& bw = side == 0 ? hit->second : nw;
        return concat(fw, inverse(bw));
      }
      seen[side][k] = nw;
      frontier[side].push_back({std::move(np), std::move(nw)});
    }
  }
  why = "search space inside the coordinate box exhausted";
  return std::nullopt;
}

}  // namespace detail

/// Integral isometry g of l with g(x1) = y1 and g(x2) = y2. The result is
/// always verified; failures carry a diagnostic instead of a map.
inline TransportResult transport_pair(const IntegralLattice& l, const IntVector& x1, const IntVector& y1,
                                      const IntVector& x2, const IntVector& y2, const TransportConfig& cfg = {}) {
  TransportResult res;
  if (l.square(x1) != l.square(y1) || l.square(x2) != l.square(y2) || l.inner(x1, x2) != l.inner(y1, y2))
    throw LatticeError("transport_pair: Gram data of the two pairs differ");
  if (!is_primitive_sublattice(std::vector<IntVector>{x1, x2}) || !is_primitive_sublattice(std::vector<IntVector>{y1, y2}))
    throw LatticeError("transport_pair: spans must be primitive");

  auto finish = [&](Word w, const std::string& method) {
    Isometry g = from_word(l, w);
    if (g.integral() && verify(g) && g.apply_int(x1) == y1 && g.apply_int(x2) == y2) {
      res.ok = true;
      res.map = std::move(g);
      res.method = method;
    } else {
      res.ok = false;
      res.diagnostic = method + " word failed verification";
    }
    return res;
  };

  if (x1 == y1 && x2 == y2) return finish({}, "identity");

  auto frames = hyperbolic_frames(l);
  if (frames.size() >= 3) {
    Reduction rx = eichler_reduce(l, x1, frames[0], frames[1]);
    Reduction ry = eichler_reduce(l, y1, frames[0], frames[1]);
    const IntVector& c = rx.canonical;
    IntVector m = c;
    m[frames[0].e] = m[frames[0].f] = 0;
    const Integer c2 = l.square(c);
    if (rx.canonical == ry.canonical && is_zero(m) && c2 != 0) {
      IntVector x2p = apply_word(l, rx.word, x2);
      IntVector y2p = apply_word(l, ry.word, y2);
      // N = c^perp with basis [frames 2 and 3, h, remaining coordinates].
      const Integer d = c[frames[0].e], b = c[frames[0].f];
      const Integer g = gcd(d, b);
      std::vector<IntVector> cols;
      for (std::size_t a : {frames[1].e, frames[1].f, frames[2].e, frames[2].f}) cols.push_back(unit_vector(l.rank(), a));
      IntVector h(l.rank());
      h[frames[0].e] = d / g;
      h[frames[0].f] = -b / g;
      cols.push_back(h);
      for (std::size_t i = 0; i < l.rank(); ++i) {
        if (i == frames[0].e || i == frames[0].f || i == frames[1].e || i == frames[1].f || i == frames[2].e ||
            i == frames[2].f)
          continue;
        cols.push_back(unit_vector(l.rank(), i));
      }
      IntMatrix nb = IntMatrix::from_columns(cols, l.rank());
      IntegralLattice nl(gram_of(l, nb), l.label() + "-perp");
      auto project = [&](const IntVector& y) { return added(scaled(y, c2), scaled(c, Integer(-l.inner(y, c)))); };
      IntVector zx = project(x2p), zy = project(y2p);
      // Coordinates in the N basis: nb has a unit column for each ambient
      // coordinate except the U1 pair, which is carried by h.
      auto ncoords = [&](const IntVector& z) -> std::optional<IntVector> {
        IntVector out(cols.size());
        std::size_t k = 0;
        for (std::size_t a : {frames[1].e, frames[1].f, frames[2].e, frames[2].f}) out[k++] = z[a];
        Integer hc;
        if (h[frames[0].e] != 0) {
          if (!divides(h[frames[0].e], z[frames[0].e])) return std::nullopt;
          hc = z[frames[0].e] / h[frames[0].e];
        } else {
          if (!divides(h[frames[0].f], z[frames[0].f])) return std::nullopt;
          hc = z[frames[0].f] / h[frames[0].f];
        }
        out[k++] = hc;
        for (std::size_t i = 0; i < l.rank(); ++i) {
          if (i == frames[0].e || i == frames[0].f || i == frames[1].e || i == frames[1].f || i == frames[2].e ||
              i == frames[2].f)
            continue;
          out[k++] = z[i];
        }
        if (nb * out != z) return std::nullopt;
        return out;
      };
      auto nzx = ncoords(zx), nzy = ncoords(zy);
      if (nzx && nzy && is_zero(*nzx) && is_zero(*nzy)) {
        // x2 is a multiple of x1 on both sides; the first move already works.
        return finish(concat(rx.word, inverse(ry.word)), "constructive");
      }
      if (nzx && nzy && !is_zero(*nzx) && !is_zero(*nzy)) {
        const Integer kx = content(*nzx), ky = content(*nzy);
        if (kx == ky) {
          IntVector px = *nzx, py = *nzy;
          for (auto& v : px) v /= kx;
          for (auto& v : py) v /= ky;
          Frame n1{0, 1}, n2{2, 3};
          Reduction sx = eichler_reduce(nl, px, n1, n2);
          Reduction sy = eichler_reduce(nl, py, n1, n2);
          if (sx.canonical == sy.canonical) {
            Word kw = concat(detail::lift_word(sx.word, nb), inverse(detail::lift_word(sy.word, nb)));
            Word full = concat(concat(rx.word, kw), inverse(ry.word));
            TransportResult r = finish(std::move(full), "constructive");
            if (r.ok) return r;
          }
        }
      }
    }
  }

  std::string why;
  auto w = detail::pair_search(l, {x1, x2}, {y1, y2}, cfg.max_steps, why);
  if (!w) {
    res.ok = false;
    res.diagnostic = "transport_pair: " + why;
    return res;
  }
  return finish(std::move(*w), "search");
}

}  // namespace k3lat
