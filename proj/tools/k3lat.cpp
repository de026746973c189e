// k3lat command line tool.
//
// Exit codes: 0 verified success, 2 honest failure or exhausted bound,
// 1 invalid input.

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "k3lat/k3lat.hpp"

using namespace k3lat;
using io::json;

namespace {

struct Options {
  bool json_out = false;
  long bound_t = 1000000;
  long delta_box = 8;
  long transport_steps = 200000;
  unsigned seed = 1;
  std::string config;

  DecideConfig decide_config() const {
    DecideConfig c;
    c.bound_t = bound_t;
    c.delta.box = delta_box;
    c.delta.transport.max_steps = transport_steps;
    return c;
  }
};

// A config file supplies defaults; explicit flags win.
void apply_config(Options& o, const CLI::App& app) {
  if (o.config.empty()) return;
  std::ifstream in(o.config);
  if (!in) throw InvalidInput("cannot open config file " + o.config);
  json j = json::parse(in);
  auto take = [&](const char* key, const char* flag, long& dst) {
    if (j.contains(key) && app.count(flag) == 0) dst = j.at(key).get<long>();
  };
  take("bound_t", "--bound-t", o.bound_t);
  take("delta_box", "--delta-box", o.delta_box);
  take("transport_steps", "--transport-steps", o.transport_steps);
  if (j.contains("seed") && app.count("--seed") == 0) o.seed = j.at("seed").get<unsigned>();
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

IntVector parse_ints(const std::string& s) {
  IntVector v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    Integer x;
    if (x.set_str(item, 10) != 0) throw InvalidInput("bad integer '" + item + "'");
    v.push_back(x);
  }
  return v;
}

Triple parse_triple(const std::string& s) {
  IntVector v = parse_ints(s);
  if (v.size() != 3) throw InvalidInput("expected r,k,s");
  return {v[0], v[1], v[2]};
}

void emit(const Options& o, const json& j, const std::string& text) {
  if (o.json_out)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text;
}

IntegralLattice lattice_by_kind(const std::string& kind, long n) {
  if (kind == "u") return build_standard(StandardKind::U);
  if (kind == "e8") return build_standard(StandardKind::E8Minus);
  if (kind == "k3") return k3_lattice();
  if (kind == "mukai") return mukai_lattice();
  if (kind == "k3n") return k3n_lattice(n);
  throw InvalidInput("unknown lattice kind '" + kind + "'");
}

// ---------------------------------------------------------------------------

int cmd_lattice_info(const Options& o, const std::string& kind, long n, const std::string& file) {
  IntegralLattice l = file.empty() ? lattice_by_kind(kind, n) : io::lattice_from(read_json_file(file));
  auto [p, q] = signature(l);
  FiniteAbelianGroup g = discriminant_group(l);
  json j{{"label", l.label()}, {"rank", l.rank()}, {"signature", {p, q}}, {"det", io::to_json(l.det())},
         {"discriminant", io::to_json(g.invariant_factors)}};
  std::ostringstream t;
  t << l.label() << ": rank " << l.rank() << ", signature (" << p << "," << q << "), det " << l.det()
    << ", discriminant " << (g.invariant_factors.empty() ? "trivial" : to_string(g.invariant_factors)) << "\n";
  emit(o, j, t.str());
  return 0;
}

int cmd_eichler_reduce(const Options& o, const std::string& vec) {
  IntegralLattice L = mukai_lattice();
  IntVector x = parse_ints(vec);
  if (x.size() != L.rank()) throw InvalidInput("vector must have 24 entries");
  if (is_zero(x)) throw InvalidInput("vector must be nonzero");
  Reduction red = eichler_reduce(L, x);
  bool ok = apply_word(L, red.word, x) == red.canonical;
  json j{{"input", io::to_json(x)}, {"word", io::to_json(red.word)}, {"canonical", io::to_json(red.canonical)},
         {"divisibility", io::to_json(red.div)}, {"replay_ok", ok}};
  std::ostringstream t;
  t << "canonical " << to_string(red.canonical) << "\nwords " << red.word.size() << " generators, replay "
    << (ok ? "ok" : "FAILED") << "\n";
  emit(o, j, t.str());
  return ok ? 0 : 2;
}

int cmd_delta_find(const Options& o, const Integer& d, const Triple& v) {
  K3Input probe{d, std::nullopt, {1, 0, -norm_of(v, d)}, v};
  validate(probe);
  SurfaceSetup S = surface_setup(d);
  MukaiModel m = surface_model(S, v);
  DeltaConfig cfg = o.decide_config().delta;
  try {
    DeltaClass dc = find_delta(m, std::nullopt, cfg);
    TorsionClass th = theta(m, dc);
    json j{{"v", io::to_json(m.v)},           {"n", m.n},
           {"delta", io::to_json(dc.delta)},  {"method", dc.method},
           {"theta", io::to_json(th.coords)}, {"theta_modulus", io::to_json(th.modulus)},
           {"theta_order", io::to_json(torsion_order(th))}};
    emit(o, j, "delta " + to_string(dc.delta) + " (" + dc.method + ")\n");
    return 0;
  } catch (const SearchExhausted& e) {
    emit(o, json{{"error", e.what()}}, std::string("failure: ") + e.what() + "\n");
    return 2;
  }
}

int cmd_psi_build(const Options& o, const Integer& d, const Triple& v, const Triple& w, const Integer& t) {
  validate(K3Input{d, std::nullopt, v, w});
  SurfaceSetup S = surface_setup(d);
  MukaiModel X = surface_model(S, w);
  Isometry phi = from_word(S.L, phi_word_for(S, t));
  IntVector pw = phi.apply_int(X.v);
  Triple tv = S.L.square(subtracted(pw, S.embed(v))) == 0 ? negated(v) : v;
  MukaiModel Y = surface_model(S, tv);
  try {
    DeltaClass dv = find_delta(X, DeltaConstraint{phi, Y.v}, o.decide_config().delta);
    DeltaClass dw{added(subtracted(phi.apply_int(dv.delta), pw), Y.v), "transported"};
    PsiTilde pt = build_psi_tilde(X, Y, phi, dv, dw);
    json j{{"r", io::to_json(pt.r)},
           {"delta_v", io::to_json(dv.delta)},
           {"delta_w", io::to_json(dw.delta)},
           {"psi_tilde", io::to_json(pt.map)},
           {"twisted_period_relation", twisted_period_relation(pt, X, Y, phi, dv, dw)}};
    emit(o, j, "psi~ built, r = " + pt.r.get_str() + ", integral " + (pt.map.integral() ? "yes" : "no") + "\n");
    return 0;
  } catch (const SearchExhausted& e) {
    emit(o, json{{"error", e.what()}}, std::string("failure: ") + e.what() + "\n");
    return 2;
  }
}

}  // namespace

namespace {

int exit_code(const EquivalenceCertificate& c) { return c.verdict == Verdict::Failure ? 2 : 0; }

int cmd_decide(const Options& o, const K3Input& in, const std::string& out) {
  EquivalenceCertificate c = decide(in, o.decide_config());
  VerifyResult vr = verify_certificate(c);
  if (!vr) {
    // The certificate is verified before it is written.
    std::cerr << "internal error: certificate rejected by verifier: " << vr.failure << "\n";
    return 2;
  }
  json j = io::to_json(c);
  if (!out.empty()) {
    std::ofstream f(out);
    f << j.dump(2) << "\n";
    if (!f) throw InvalidInput("cannot write " + out);
  }
  if (o.json_out) {
    if (out.empty()) std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "verdict " << to_string(c.verdict) << " (route " << c.route << "), n = " << c.n
              << ", epsilon = " << c.epsilon;
    if (c.t) std::cout << ", t = " << *c.t;
    std::cout << "\n";
    if (!c.diagnostic.empty()) std::cout << "diagnostic: " << c.diagnostic << "\n";
    for (const auto& [k, v] : c.flags) std::cout << "  " << k << " = " << (v ? "true" : "false") << "\n";
    if (out.empty()) std::cout << j.dump() << "\n";
  }
  return exit_code(c);
}

int cmd_verify(const Options& o, const std::string& file) {
  EquivalenceCertificate c = io::certificate_from(read_json_file(file));
  VerifyResult vr = verify_certificate(c);
  json j{{"accepted", vr.ok}, {"checks", vr.checks}, {"verdict", to_string(c.verdict)}};
  if (!vr.ok) j["failure"] = vr.failure;
  std::string text = vr.ok ? "accepted (" + std::to_string(vr.checks) + " checks), verdict " + to_string(c.verdict) + "\n"
                           : "REJECTED: " + vr.failure + "\n";
  emit(o, j, text);
  if (!vr.ok) return 2;
  return exit_code(c);
}

// Short randomized consistency run over the core layers.
int cmd_selftest(const Options& o, int rounds) {
  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<int> small(-3, 3);
  IntegralLattice L = mukai_lattice();
  long failures = 0;
  for (int i = 0; i < rounds; ++i) {
    IntVector x(L.rank());
    for (auto& c : x) c = small(rng);
    if (is_zero(x)) continue;
    Reduction red = eichler_reduce(L, x);
    if (apply_word(L, red.word, x) != red.canonical) ++failures;
    RatVector b(L.rank());
    for (std::size_t j = 2; j < L.rank(); ++j) b[j] = small(rng);
    Isometry g = exp_map(L, Frame{0, 1}, b);
    if (!verify(g) || !g.integral() || !is_discriminant_trivial(g)) ++failures;
  }
  for (long d = 1; d <= 2; ++d) {
    EquivalenceCertificate c = decide(K3Input{d, std::nullopt, {1, 0, -2 - d}, {2, 1, -1}}, o.decide_config());
    if (c.verdict == Verdict::Failure || !verify_certificate(c)) ++failures;
  }
  emit(o, json{{"rounds", rounds}, {"failures", failures}},
       "selftest: " + std::to_string(rounds) + " rounds, " + std::to_string(failures) + " failures\n");
  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k3lat: exact lattice computations for K3^[n]-type Mukai lattices"};
  app.require_subcommand(1);
  Options o;
  app.add_flag("--json", o.json_out, "machine-readable JSON output");
  app.add_option("--bound-t", o.bound_t, "bound on |t| in the t-search")->capture_default_str();
  app.add_option("--delta-box", o.delta_box, "sup-norm box for delta enumeration")->capture_default_str();
  app.add_option("--transport-steps", o.transport_steps, "step budget of the transport search")->capture_default_str();
  app.add_option("--seed", o.seed, "seed for sampled suites (selftest)")->capture_default_str();
  app.add_option("--config", o.config, "JSON file with bound_t, delta_box, transport_steps, seed");

  auto* lattice = app.add_subcommand("lattice", "lattice utilities")->require_subcommand(1);
  auto* info = lattice->add_subcommand("info", "rank, signature and discriminant group");
  std::string kind = "mukai", lattice_file;
  long n = 2;
  info->add_option("--kind", kind, "u | e8 | k3 | mukai | k3n")->capture_default_str();
  info->add_option("--n", n, "n for k3n")->capture_default_str();
  info->add_option("--file", lattice_file, "JSON lattice {label, gram}");

  auto* eich = app.add_subcommand("eichler", "Eichler transvection utilities")->require_subcommand(1);
  auto* reduce = eich->add_subcommand("reduce", "reduce a Mukai lattice vector to canonical form");
  std::string vec;
  reduce->add_option("vector", vec, "24 comma-separated integers")->required();

  std::string d_str = "1", v_str, w_str, t_str = "0", input_file, out_file;
  auto* delta = app.add_subcommand("delta", "delta classes")->require_subcommand(1);
  auto* dfind = delta->add_subcommand("find", "find a delta class for (r,k,s) on a surface of degree 2d");
  dfind->add_option("--d", d_str)->required();
  dfind->add_option("--v", v_str, "r,k,s")->required();

  auto* psi = app.add_subcommand("psi", "extended isometries")->require_subcommand(1);
  auto* pbuild = psi->add_subcommand("build", "build psi~ from phi = exp(t H)");
  pbuild->add_option("--d", d_str)->required();
  pbuild->add_option("--v", v_str, "r1,k1,s1 (rank one)")->required();
  pbuild->add_option("--w", w_str, "r,k,s")->required();
  pbuild->add_option("--t", t_str)->capture_default_str();

  auto* equiv = app.add_subcommand("equiv", "equivalence decisions")->require_subcommand(1);
  auto* decide_cmd = equiv->add_subcommand("decide", "decide a pair and emit a certificate");
  decide_cmd->add_option("--input", input_file, "JSON {d, v, w[, picard_gram]}");
  decide_cmd->add_option("--d", d_str);
  decide_cmd->add_option("--v", v_str, "r1,k1,s1");
  decide_cmd->add_option("--w", w_str, "r,k,s");
  decide_cmd->add_option("--out", out_file, "write the certificate here");

  auto* cert = app.add_subcommand("cert", "certificates")->require_subcommand(1);
  auto* verify_cmd = cert->add_subcommand("verify", "re-check a certificate from scratch");
  std::string cert_file;
  verify_cmd->add_option("file", cert_file)->required()->check(CLI::ExistingFile);

  auto* self = app.add_subcommand("selftest", "quick randomized self check");
  int rounds = 50;
  self->add_option("--rounds", rounds)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    apply_config(o, app);
    auto integer = [](const std::string& s) {
      Integer x;
      if (x.set_str(s, 10) != 0) throw InvalidInput("bad integer '" + s + "'");
      return x;
    };
    if (*info) return cmd_lattice_info(o, kind, n, lattice_file);
    if (*reduce) return cmd_eichler_reduce(o, vec);
    if (*dfind) return cmd_delta_find(o, integer(d_str), parse_triple(v_str));
    if (*pbuild) return cmd_psi_build(o, integer(d_str), parse_triple(v_str), parse_triple(w_str), integer(t_str));
    if (*decide_cmd) {
      K3Input in;
      if (!input_file.empty()) {
        in = io::input_from(read_json_file(input_file));
      } else {
        if (v_str.empty() || w_str.empty()) throw InvalidInput("give --input or all of --d, --v, --w");
        in = K3Input{integer(d_str), std::nullopt, parse_triple(v_str), parse_triple(w_str)};
      }
      return cmd_decide(o, in, out_file);
    }
    if (*verify_cmd) return cmd_verify(o, cert_file);
    if (*self) return cmd_selftest(o, rounds);
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const LatticeError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const SearchExhausted& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
