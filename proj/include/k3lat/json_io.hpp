#pragma once

// JSON encoding. Integers that fit in int64 are JSON numbers, larger ones are
// decimal strings. Rationals are "p/q" strings, or plain integers when q = 1.

#include <string>

#include "json.hpp"
#include "k3lat/verify.hpp"

namespace k3lat::io {

using json = nlohmann::ordered_json;

inline json to_json(const Integer& x) {
  if (x.fits_slong_p()) return json(static_cast<std::int64_t>(x.get_si()));
  return json(x.get_str());
}

inline Integer integer_from(const json& j) {
  if (j.is_number_integer()) return Integer(j.get<std::int64_t>());
  if (j.is_string()) {
    Integer x;
    if (x.set_str(j.get<std::string>(), 10) != 0) throw InvalidInput("bad integer string '" + j.get<std::string>() + "'");
    return x;
  }
  throw InvalidInput("expected an integer, got " + j.dump());
}

inline json to_json(const Rational& q) {
  if (q.get_den() == 1) return to_json(Integer(q.get_num()));
  return json(q.get_str());
}

inline Rational rational_from(const json& j) {
  if (j.is_string()) {
    Rational q;
    if (q.set_str(j.get<std::string>(), 10) != 0 || q.get_den() == 0)
      throw InvalidInput("bad rational '" + j.get<std::string>() + "'");
    q.canonicalize();
    return q;
  }
  return Rational(integer_from(j));
}

template <class T>
json to_json(const std::vector<T>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_json(x));
  return a;
}

inline IntVector int_vector_from(const json& j) {
  if (!j.is_array()) throw InvalidInput("expected an integer array");
  IntVector v;
  for (const auto& x : j) v.push_back(integer_from(x));
  return v;
}

inline RatVector rat_vector_from(const json& j) {
  if (!j.is_array()) throw InvalidInput("expected a rational array");
  RatVector v;
  for (const auto& x : j) v.push_back(rational_from(x));
  return v;
}

inline json to_json(const IntMatrix& m) {
  json a = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) a.push_back(to_json(m.row(i)));
  return a;
}

inline IntMatrix int_matrix_from(const json& j) {
  if (!j.is_array()) throw InvalidInput("expected a matrix");
  std::vector<IntVector> rows;
  for (const auto& r : j) rows.push_back(int_vector_from(r));
  if (rows.empty()) return IntMatrix(0, 0);
  for (const auto& r : rows)
    if (r.size() != rows[0].size()) throw InvalidInput("ragged matrix");
  return IntMatrix::from_rows(rows);
}

inline json to_json(const Triple& t) { return json::array({to_json(t[0]), to_json(t[1]), to_json(t[2])}); }

inline Triple triple_from(const json& j) {
  IntVector v = int_vector_from(j);
  if (v.size() != 3) throw InvalidInput("expected a Mukai triple (r, k, s)");
  return {v[0], v[1], v[2]};
}

// ---------------------------------------------------------------------------

inline json to_json(const IntegralLattice& l) { return {{"label", l.label()}, {"gram", to_json(l.gram())}}; }

inline IntegralLattice lattice_from(const json& j) {
  try {
    return IntegralLattice(int_matrix_from(j.at("gram")), j.value("label", std::string("lattice")));
  } catch (const LatticeError& e) {
    throw InvalidInput(e.what());
  }
}

inline json to_json(const Word& w) {
  json a = json::array();
  for (const auto& t : w) a.push_back(to_string(t));
  return a;
}

inline Word word_from(const json& j) {
  Word w;
  for (const auto& t : j) {
    try {
      w.push_back(parse_tag(t.get<std::string>()));
    } catch (const LatticeError& e) {
      throw InvalidInput(e.what());
    }
  }
  return w;
}

inline json to_json(const Isometry& g) {
  json j{{"domain", to_json(g.domain)}, {"codomain", to_json(g.codomain)}, {"num", to_json(g.num)},
         {"den", to_json(g.den)}};
  if (g.word) j["word"] = to_json(*g.word);
  return j;
}

inline Isometry isometry_from(const json& j) {
  Isometry g{lattice_from(j.at("domain")), lattice_from(j.at("codomain")), int_matrix_from(j.at("num")),
             integer_from(j.at("den")), std::nullopt};
  if (g.num.rows() != g.codomain.rank() || g.num.cols() != g.domain.rank()) throw InvalidInput("isometry: bad shape");
  if (g.den <= 0) throw InvalidInput("isometry: den must be positive");
  if (j.contains("word")) g.word = word_from(j.at("word"));
  return g;
}

// ---------------------------------------------------------------------------
// Certificates.

inline json to_json(const K3Input& in) {
  json j{{"d", to_json(in.d)}, {"v", to_json(in.v)}, {"w", to_json(in.w)}};
  if (in.picard_gram) j["picard_gram"] = to_json(*in.picard_gram);
  return j;
}

inline K3Input input_from(const json& j) {
  K3Input in;
  in.d = integer_from(j.at("d"));
  in.v = triple_from(j.at("v"));
  in.w = triple_from(j.at("w"));
  if (j.contains("picard_gram")) in.picard_gram = int_matrix_from(j.at("picard_gram"));
  return in;
}

inline json to_json(const PsiProfile& p) {
  return {{"r", to_json(p.r)},           {"m", to_json(p.m)},         {"s", to_json(p.s)},
          {"m_prime", to_json(p.m_prime)}, {"s_prime", to_json(p.s_prime)}, {"beta", to_json(p.beta)},
          {"alpha", to_json(p.alpha)}};
}

inline PsiProfile profile_from(const json& j) {
  return {integer_from(j.at("r")),       integer_from(j.at("m")),       integer_from(j.at("s")),
          integer_from(j.at("m_prime")), integer_from(j.at("s_prime")), int_vector_from(j.at("beta")),
          int_vector_from(j.at("alpha"))};
}

inline json to_json(const ExceptionalData& x) {
  return {{"ell", to_json(x.ell)}, {"r0", to_json(x.r0)}, {"m0", to_json(x.m0)},   {"t", to_json(x.t)},
          {"u", to_json(x.u)},     {"sign", x.sign},      {"phi", to_json(x.phi)}, {"shift", to_json(x.shift)},
          {"psi_pp", to_json(x.psi_pp)}};
}

inline ExceptionalData exceptional_from(const json& j) {
  ExceptionalData x;
  x.ell = integer_from(j.at("ell"));
  x.r0 = integer_from(j.at("r0"));
  x.m0 = integer_from(j.at("m0"));
  x.t = integer_from(j.at("t"));
  x.u = int_vector_from(j.at("u"));
  x.sign = j.at("sign").get<int>();
  x.phi = isometry_from(j.at("phi"));
  x.shift = int_vector_from(j.at("shift"));
  x.psi_pp = isometry_from(j.at("psi_pp"));
  return x;
}

inline json to_json(const CaseWitness& w) {
  json j{{"profile", to_json(w.profile)}, {"F_sign", w.F_sign}};
  if (w.F) j["F"] = to_json(*w.F);
  if (w.gamma) j["gamma"] = to_json(*w.gamma);
  if (w.k) j["k"] = to_json(*w.k);
  if (w.s_k) j["s_k"] = to_json(*w.s_k);
  if (w.exceptional) j["exceptional"] = to_json(*w.exceptional);
  return j;
}

inline CaseWitness witness_from(const json& j) {
  CaseWitness w;
  w.profile = profile_from(j.at("profile"));
  w.F_sign = j.at("F_sign").get<int>();
  if (j.contains("F")) w.F = isometry_from(j.at("F"));
  if (j.contains("gamma")) w.gamma = int_vector_from(j.at("gamma"));
  if (j.contains("k")) w.k = integer_from(j.at("k"));
  if (j.contains("s_k")) w.s_k = integer_from(j.at("s_k"));
  if (j.contains("exceptional")) w.exceptional = exceptional_from(j.at("exceptional"));
  return w;
}

inline json to_json(const BrauerRecord& b) {
  return {{"bfield", to_json(b.rep.bfield)}, {"denominator", to_json(b.rep.denominator)}, {"trivial", b.trivial}};
}

inline BrauerRecord brauer_from(const json& j) {
  return {BrauerRep{rat_vector_from(j.at("bfield")), integer_from(j.at("denominator"))}, j.at("trivial").get<bool>()};
}

inline json to_json(const EquivalenceCertificate& c) {
  json j;
  j["schema"] = c.schema;
  j["input"] = to_json(c.input);
  j["n"] = c.n;
  j["verdict"] = to_string(c.verdict);
  j["route"] = c.route;
  j["diagnostic"] = c.diagnostic;
  j["epsilon"] = c.epsilon;
  if (c.t) j["t"] = to_json(*c.t);
  j["isometry_word"] = to_json(c.phi_word);
  j["target"] = to_json(c.target);
  j["delta_v"] = to_json(c.delta_dom);
  j["delta_w"] = to_json(c.delta_cod);
  if (c.psi_tilde) j["psi_tilde"] = to_json(*c.psi_tilde);
  if (c.r_psi) j["r_psi"] = to_json(*c.r_psi);
  if (c.witness) j["witness"] = to_json(*c.witness);
  if (c.brauer_left) j["brauer_left"] = to_json(*c.brauer_left);
  if (c.brauer_right) j["brauer_right"] = to_json(*c.brauer_right);
  j["flags"] = json::object();
  for (const auto& [k, v] : c.flags) j["flags"][k] = v;
  j["replay_log"] = c.replay_log;
  return j;
}

inline EquivalenceCertificate certificate_from(const json& j) {
  try {
    EquivalenceCertificate c;
    c.schema = j.at("schema").get<int>();
    if (c.schema != 1) throw InvalidInput("unsupported certificate schema " + std::to_string(c.schema));
    c.input = input_from(j.at("input"));
    c.n = j.at("n").get<long>();
    c.verdict = parse_verdict(j.at("verdict").get<std::string>());
    c.route = j.at("route").get<std::string>();
    c.diagnostic = j.at("diagnostic").get<std::string>();
    c.epsilon = j.at("epsilon").get<int>();
    if (j.contains("t")) c.t = integer_from(j.at("t"));
    c.phi_word = word_from(j.at("isometry_word"));
    c.target = triple_from(j.at("target"));
    c.delta_dom = int_vector_from(j.at("delta_v"));
    c.delta_cod = int_vector_from(j.at("delta_w"));
    if (j.contains("psi_tilde")) c.psi_tilde = isometry_from(j.at("psi_tilde"));
    if (j.contains("r_psi")) c.r_psi = integer_from(j.at("r_psi"));
    if (j.contains("witness")) c.witness = witness_from(j.at("witness"));
    if (j.contains("brauer_left")) c.brauer_left = brauer_from(j.at("brauer_left"));
    if (j.contains("brauer_right")) c.brauer_right = brauer_from(j.at("brauer_right"));
    for (const auto& [k, v] : j.at("flags").items()) c.flags[k] = v.get<bool>();
    c.replay_log = j.at("replay_log").get<std::vector<std::string>>();
    return c;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("certificate JSON: ") + e.what());
  }
}

}  // namespace k3lat::io
