#include "qkahler/drivers.hpp"

#include "qkahler/chern.hpp"

#include <random>

namespace qk {
namespace {

template <class F>
struct Session {
  RunConfig cfg;
  Model<F> model;
  std::map<int, TwistedBundle<F>> bundles;
  std::mt19937_64 rng;

  explicit Session(const RunConfig& c)
      : cfg(c),
        model(FieldOps<F>::from_rational(parse_rational(c.q)), c.twolmax(),
              c.normalization, tolerance(c)),
        rng(c.seed) {}

  static F tolerance(const RunConfig& c) {
    if constexpr (FieldOps<F>::mode == Mode::Exact) {
      return F(0);
    } else {
      return F(c.tol.empty() ? std::string("1e-25") : c.tol);
    }
  }

  const TwistedBundle<F>& bundle(int k) {
    auto it = bundles.find(k);
    if (it != bundles.end()) return it->second;
    TwistedBundle<F> b = make_bundle(model, k);
    if (cfg.inject_fault && k == std::min(1, cfg.bundle_hi)) {
      // negative control: spoil one matrix entry of dbar
      for (const auto& [key, m] : b.dbar.parts()) {
        const auto& [from, to, l] = key;
        Matrix<F> bad = m;
        bad(0, 0) += Cx<F>::one();
        b.dbar.set_part(from, to, l, bad);
        break;
      }
    }
    return bundles.emplace(k, std::move(b)).first->second;
  }

  ModelForm<F> random_form(int k) {
    SpacePtr sp = model.space(k);
    std::vector<std::tuple<Bidegree, HalfInt, std::size_t>> slots;
    for (const auto& [ab, blocks] : sp->components())
      for (const auto& blk : blocks) slots.push_back({ab, blk.label, blk.dim});
    ModelForm<F> out;
    if (slots.empty()) return out;
    std::uniform_int_distribution<std::size_t> pick(0, slots.size() - 1);
    std::uniform_int_distribution<int> coeff(-3, 3);
    for (int t = 0; t < 3; ++t) {
      auto [ab, l, dim] = slots[pick(rng)];
      std::uniform_int_distribution<std::size_t> idx(0, dim - 1);
      Cx<F> c(F(coeff(rng)), F(coeff(rng)));
      out.accumulate(model.basis_form(k, ab, l, idx(rng)) * c, Cx<F>::one());
    }
    return out;
  }

  bool pass(const F& r) const { return pass_of(r, model.pivot_policy()); }

  CheckResult check(const std::string& name, const F& r,
                    const std::string& detail = "") {
    return CheckResult{name, pass(r), FieldOps<F>::str(r), detail};
  }
};

template <class F>
void append_core_checks(Session<F>& s, Report& rep) {
  const Model<F>& model = s.model;
  // quantized enveloping algebra relations per block
  F rel{};
  for (int twol = 0; twol <= model.twolmax(); ++twol) {
    F r = model.block_relation_residual(twol);
    if (rel < r) rel = r;
  }
  rep.checks.push_back(s.check("uq_sl2_relations", rel));

  // calculus: dbar^2 = del^2 = 0 on every bundle, d^2 = 0 untwisted
  F r_dbar2{}, r_del2{};
  for (int k = s.cfg.bundle_lo; k <= s.cfg.bundle_hi; ++k) {
    const auto& b = s.bundle(k);
    F r1 = b.dbar.compose(b.dbar).max_abs();
    F r2 = b.del.compose(b.del).max_abs();
    if (r_dbar2 < r1) r_dbar2 = r1;
    if (r_del2 < r2) r_del2 = r2;
  }
  rep.checks.push_back(s.check("dbar_squared", r_dbar2));
  rep.checks.push_back(s.check("del_squared", r_del2));
  {
    const auto& b0 = s.bundle(0);
    BlockMap<F> d = b0.dbar + b0.del;
    rep.checks.push_back(s.check("d_squared_untwisted", d.compose(d).max_abs()));
  }

  // star relation del o star = star o dbar (as maps space(k) -> space(-k))
  F star_rel{};
  for (int k = s.cfg.bundle_lo; k <= s.cfg.bundle_hi; ++k) {
    BlockMap<F> st = model.star_map(k);
    F r = residual(model.del_map(-k).compose(st), st.compose(model.dbar_map(k)));
    if (star_rel < r) star_rel = r;
  }
  rep.checks.push_back(s.check("star_relation", star_rel));

  // star structure: involution and kappa reality/centrality
  {
    BlockMap<F> st0 = model.star_map(0);
    F r = residual(st0.compose(st0), BlockMap<F>::identity(model.space(0)));
    rep.checks.push_back(s.check("star_involution", r));
    ModelForm<F> kap = model.kappa();
    F kr = (model.star(kap) - kap).max_abs();
    ModelForm<F> m = s.random_form(0);
    ModelForm<F> m00;  // degree-0 part only
    if (m.parts.count(Frame::One)) m00.parts[Frame::One] = m.parts[Frame::One];
    F kc = (model.mul(kap, m00) - model.mul(m00, kap)).max_abs();
    rep.checks.push_back(s.check("kappa_real", kr));
    rep.checks.push_back(s.check("kappa_central_on_m", kc));
    // coinvariant (1,1)-forms are one-dimensional: the trivial block of the
    // weight-0 slice
    std::size_t coinv = model.space(0)->dim(Bidegree{1, 1}, HalfInt(0));
    rep.checks.push_back(CheckResult{"kappa_coinvariant_unique", coinv == 1,
                                     coinv == 1 ? "0" : "1", ""});
  }

  // Haar state: unit value, vanishing on higher blocks, modular invariance
  {
    const auto& alg = model.algebra();
    F r{};
    Cx<F> one = alg.haar(AlgebraElement<F>::unit());
    r = (one - Cx<F>::one()).mag();
    for (int twol = 1; twol <= model.twolmax(); ++twol)
      for (int i = 0; i <= twol; ++i) {
        F v = alg.haar(AlgebraElement<F>::basis(twol, -twol + 2 * i,
                                                twol % 2 == 0 ? 0 : 1))
                  .mag();
        if (r < v) r = v;
      }
    rep.checks.push_back(s.check("haar_state_values", r));
    F kms{};
    for (int t = 0; t < 8; ++t) {
      ModelForm<F> x = s.random_form(0), y = s.random_form(0);
      AlgebraElement<F> xa = x.parts.count(Frame::One) ? x.parts[Frame::One]
                                                       : AlgebraElement<F>{};
      AlgebraElement<F> ya = y.parts.count(Frame::One) ? y.parts[Frame::One]
                                                       : AlgebraElement<F>{};
      Cx<F> lhs = alg.haar(alg.mul(xa, ya));
      Cx<F> rhs = alg.haar(alg.mul(ya, alg.modular(xa)));
      F v = (lhs - rhs).mag();
      if (kms < v) kms = v;
    }
    rep.checks.push_back(s.check("haar_modular_invariance", kms));
  }
}

template <class F>
void append_bundle_checks(Session<F>& s, Report& rep) {
  const Model<F>& model = s.model;
  F sl2_worst{}, triple_worst{}, metric_sym{}, lef_adj{}, stokes{}, adj_oracle{},
      pw_orth{}, intertwine{}, star_hodge{};
  bool grams_pos = true;
  std::string gram_witness;

  for (int k = s.cfg.bundle_lo; k <= s.cfg.bundle_hi; ++k) {
    const auto& b = s.bundle(k);
    auto [r1, r2, r3] = sl2_residuals(*b.pair, HodgeVariant::Bidegree);
    for (const F& r : {r1, r2, r3})
      if (sl2_worst < r) sl2_worst = r;
    // Lefschetz triples: [L, d] = 0 for d in {dbar, del, d}
    for (const BlockMap<F>* d : {&b.dbar, &b.del}) {
      F r = residual(b.lef.compose(*d), d->compose(b.lef));
      if (triple_worst < r) triple_worst = r;
    }
    // metric conjugate symmetry on random pairs
    for (int t = 0; t < 4; ++t) {
      ModelForm<F> a = s.random_form(k), c = s.random_form(k);
      AlgebraElement<F> gab = hermitian_metric(model, b, a, c);
      AlgebraElement<F> gba = hermitian_metric(model, b, c, a);
      AlgebraElement<F> diff = gab;
      diff.accumulate(model.algebra().star(gba), -Cx<F>::one());
      F r = diff.max_abs();
      if (metric_sym < r) metric_sym = r;
    }
    // Lefschetz adjointness <L a, c> = <a, Lam c>
    {
      F r = adjointness_residual(b, b.lef, b.lam);
      if (lef_adj < r) lef_adj = r;
    }
    // Stokes on random pairs
    for (int t = 0; t < 4; ++t) {
      F r = stokes_residual(model, k, s.random_form(k), s.random_form(-k));
      if (stokes < r) stokes = r;
    }
    // formula codifferential vs Gram adjoint
    {
      F r = residual(b.dbar_dag, gram_adjoint(b, b.dbar));
      F r2 = residual(b.del_dag, gram_adjoint(b, b.del));
      if (adj_oracle < r) adj_oracle = r;
      if (adj_oracle < r2) adj_oracle = r2;
    }
    // Gram positivity and Peter-Weyl orthogonality
    for (const auto& [key, g] : b.gram) {
      if (!is_positive_definite(g, b.pp)) {
        grams_pos = false;
        gram_witness = "k=" + std::to_string(k) + " " + key.first.str() +
                       " l=" + key.second.str();
      }
    }
    for (const auto& [ab, blocks] : b.space->components()) {
      if (blocks.size() < 2) continue;
      for (std::size_t i = 0; i + 1 < blocks.size(); ++i) {
        ModelForm<F> x = model.basis_form(k, ab, blocks[i].label, 0);
        Element<F> ye = Element<F>::basis_vector(b.space, ab, blocks[i + 1].label, 0);
        ModelForm<F> sy = model.to_form(-k, b.hodge_bar.apply(ye));
        F r = model.integral(model.mul(x, sy)).mag();
        if (pw_orth < r) pw_orth = r;
      }
    }
    // Laplacian intertwine through *bar
    {
      F r = laplacian_intertwine_residual(b);
      if (intertwine < r) intertwine = r;
    }
    // bidegree Hodge map commutes with the star structure (untwisted only)
    if (k == 0) {
      BlockMap<F> st = model.star_map(0);
      F r = residual(b.hodge.compose(st), st.compose(b.hodge));
      star_hodge = r;
    }
  }
  rep.checks.push_back(s.check("sl2_identities", sl2_worst));
  rep.checks.push_back(s.check("lefschetz_triple_commutation", triple_worst));
  rep.checks.push_back(s.check("metric_conjugate_symmetry", metric_sym));
  rep.checks.push_back(s.check("lefschetz_adjoint", lef_adj));
  rep.checks.push_back(s.check("stokes_vanishing", stokes));
  rep.checks.push_back(s.check("codifferential_gram_oracle", adj_oracle));
  rep.checks.push_back(CheckResult{"gram_positive_definite", grams_pos,
                                   grams_pos ? "0" : "1", gram_witness});
  rep.checks.push_back(s.check("peter_weyl_orthogonality", pw_orth));
  rep.checks.push_back(s.check("laplacian_intertwine", intertwine));
  rep.checks.push_back(s.check("hodge_star_commutes_with_star", star_hodge));
}

template <class F>
void append_nakano_checks(Session<F>& s, Report& rep) {
  F nak{}, akn{}, chern_sq{}, chern_bd{}, chern_herm{}, chern_del{};
  std::string worst_name;
  bool chern_threw = false;
  std::string chern_error;
  for (int k = s.cfg.bundle_lo; k <= s.cfg.bundle_hi; ++k) {
    const auto& b = s.bundle(k);
    ChernConnection<F> c;
    try {
      c = chern_connection(s.model, b);
    } catch (const Error& e) {
      chern_threw = true;
      chern_error = "k=" + std::to_string(k) + ": " + e.what();
      continue;
    }
    if (chern_sq < c.del_f_square_residual) chern_sq = c.del_f_square_residual;
    if (chern_bd < c.bidegree_residual) chern_bd = c.bidegree_residual;
    if (chern_herm < c.hermitian_identity_residual)
      chern_herm = c.hermitian_identity_residual;
    F r = residual(c.del_f, b.del);
    if (chern_del < r) chern_del = r;
    for (const auto& [name, res] : nakano_residuals(b, c)) {
      if (nak < res) {
        nak = res;
        if (!s.pass(res)) worst_name = "k=" + std::to_string(k) + " " + name;
      }
    }
    F an = akizuki_nakano_residual(b, c);
    if (akn < an) akn = an;
  }
  rep.checks.push_back(s.check("chern_del_squared", chern_sq));
  rep.checks.push_back(s.check("chern_curvature_bidegree", chern_bd));
  if (chern_threw)
    rep.checks.push_back(CheckResult{"chern_hermitian_identity", false, "1", chern_error});
  else
    rep.checks.push_back(s.check("chern_hermitian_identity", chern_herm));
  rep.checks.push_back(s.check("chern_matches_global_del", chern_del));
  rep.checks.push_back(s.check("nakano_identities", nak, worst_name));
  rep.checks.push_back(s.check("akizuki_nakano", akn));
}

template <class F>
void append_hodge_checks(Session<F>& s, Report& rep) {
  bool dims_ok = true, two_path = true;
  F ortho{};
  std::string witness;
  for (int k = s.cfg.bundle_lo; k <= s.cfg.bundle_hi; ++k) {
    const auto& b = s.bundle(k);
    for (const auto& [ab, blocks] : b.space->components()) {
      HodgeDecompositionReport hd;
      try {
        hd = hodge_decomposition(b, ab);
      } catch (const Error& e) {
        dims_ok = false;
        witness = e.what();
        continue;
      }
      if (!hd.dims_add) dims_ok = false;
      std::size_t hq = cohomology_dim_quotient(b, ab);
      if (hq != hd.harmonic) {
        two_path = false;
        witness = "k=" + std::to_string(k) + " " + ab.str();
      }
    }
  }
  rep.checks.push_back(CheckResult{"hodge_decomposition_dims", dims_ok,
                                   dims_ok ? "0" : "1", witness});
  rep.checks.push_back(CheckResult{"cohomology_two_path_agreement", two_path,
                                   two_path ? "0" : "1", witness});

  bool diag_ok = true;
  std::string diag_witness;
  for (int k = s.cfg.bundle_lo; k <= s.cfg.bundle_hi; ++k) {
    auto dr = diagonalizability_certificate(s.bundle(k));
    if (!dr.certified) {
      diag_ok = false;
      diag_witness = "k=" + std::to_string(k) + " " + dr.witness_block;
    }
  }
  rep.checks.push_back(CheckResult{"dirac_diagonalizable", diag_ok,
                                   diag_ok ? "0" : "1", diag_witness});
  Json cert;
  cert["certified"] = diag_ok;
  rep.certificates.push_back({"diagonalizable", cert});
}

template <class F>
void append_certificates(Session<F>& s, Report& rep) {
  // positivity of the untwisted Kahler structure: all Grams of the trivial
  // bundle positive definite (checked above); reuse here
  bool kahler_pos = true;
  {
    const auto& b0 = s.bundle(0);
    for (const auto& [key, g] : b0.gram)
      if (!is_positive_definite(g, b0.pp)) kahler_pos = false;
  }
  bool order_ok = true;
  for (int k = s.cfg.bundle_lo; k <= s.cfg.bundle_hi; ++k) {
    const auto& b = s.bundle(k);
    ChernConnection<F> c;
    try {
      c = chern_connection(s.model, b);
    } catch (const Error&) {
      order_ok = false;
      continue;
    }
    PositivityCertificate cert = certify_positive(b, c, kahler_pos);
    if (cert.pass != (k > 0)) order_ok = false;
    Json j;
    j["bundle"] = k;
    j["pass"] = cert.pass;
    j["scalar"] = cert.scalar;
    j["residual"] = cert.residual;
    rep.certificates.push_back({"positivity", j});
    if (cert.pass) {
      KodairaReport kr = verify_kodaira(b, c);
      Json jk;
      jk["bundle"] = k;
      jk["vanishing"] = kr.vanishing;
      jk["sign_lemmas"] = kr.sign_lemmas;
      if (!kr.witness.empty()) jk["witness"] = kr.witness;
      rep.certificates.push_back({"kodaira", jk});
      if (!kr.vanishing || !kr.sign_lemmas)
        rep.checks.push_back(CheckResult{
            "kodaira_vanishing k=" + std::to_string(k), false, "1", kr.witness});
    }
  }
  rep.checks.push_back(CheckResult{"positivity_iff_positive_twist", order_ok,
                                   order_ok ? "0" : "1", ""});

  // Fano package (needs the anticanonical twist below the cutoff)
  if (s.model.twolmax() < 2) return;
  bool fact = factorisable(s.model, false) && factorisable(s.model, true);
  InvertibleReport inv = check_invertible(s.model, -2);
  const auto& b2 = s.bundle(2);
  PositivityCertificate p2;
  try {
    ChernConnection<F> c2 = chern_connection(s.model, b2);
    p2 = certify_positive(b2, c2, kahler_pos);
  } catch (const Error&) {
    p2.pass = false;
  }
  std::size_t h01 = cohomology_dim_harmonic(s.bundle(0), Bidegree{0, 1});
  FanoReport fr;
  fr.factorisable = fact;
  fr.canonical_invertible = inv.invertible;
  fr.anticanonical_positive = p2.pass;
  fr.h01_trivial_vanishes = h01 == 0;
  fr.fano = fact && inv.invertible && p2.pass && fr.h01_trivial_vanishes;
  fr.canonical_twist = -2;
  fr.anticanonical_twist = 2;
  Json j;
  j["factorisable"] = fr.factorisable;
  j["canonical_invertible"] = fr.canonical_invertible;
  j["anticanonical_positive"] = fr.anticanonical_positive;
  j["h01_trivial_vanishes"] = fr.h01_trivial_vanishes;
  j["canonical_twist"] = fr.canonical_twist;
  j["anticanonical_twist"] = fr.anticanonical_twist;
  j["fano"] = fr.fano;
  rep.certificates.push_back({"fano", j});
  rep.checks.push_back(CheckResult{"fano_structure", fr.fano, fr.fano ? "0" : "1", ""});
}

template <class F>
Report verify_impl(const RunConfig& cfg) {
  Session<F> s(cfg);
  Report rep;
  rep.config = cfg.to_json();
  append_core_checks(s, rep);
  append_bundle_checks(s, rep);
  append_nakano_checks(s, rep);
  append_hodge_checks(s, rep);
  append_certificates(s, rep);
  rep.notes["canonical_bundle_twist"] = -2;
  rep.notes["anticanonical_bundle_twist"] = 2;
  rep.notes["kappa"] = "-i q e+ e-";
  rep.notes["curvature_scalar"] = "i nabla^2 = q^{1-k}[k]_q L on E_k";
  return rep;
}

template <class F>
Report cohomology_impl(const RunConfig& cfg) {
  Session<F> s(cfg);
  Report rep;
  rep.config = cfg.to_json();
  bool two_path = true;
  for (int k = cfg.bundle_lo; k <= cfg.bundle_hi; ++k) {
    const auto& b = s.bundle(k);
    CohomologyRow row = cohomology_row(b, cfg.lmax);
    Json j;
    j["bundle"] = row.bundle;
    j["h00"] = row.h00;
    j["h10"] = row.h10;
    j["h01"] = row.h01;
    j["h11"] = row.h11;
    j["cutoff"] = row.cutoff;
    rep.cohomology.push_back(j);
    for (Bidegree ab : {Bidegree{0, 0}, Bidegree{1, 0}, Bidegree{0, 1}, Bidegree{1, 1}})
      if (cohomology_dim_quotient(b, ab) != cohomology_dim_harmonic(b, ab))
        two_path = false;
  }
  rep.checks.push_back(CheckResult{"cohomology_two_path_agreement", two_path,
                                   two_path ? "0" : "1", ""});
  return rep;
}

template <class F>
Report serre_impl(const RunConfig& cfg) {
  Session<F> s(cfg);
  Report rep;
  rep.config = cfg.to_json();
  bool all_ok = true, dual_dims = true;
  for (int k = cfg.bundle_lo; k <= cfg.bundle_hi; ++k) {
    const auto& b = s.bundle(k);
    for (Bidegree ab : {Bidegree{0, 0}, Bidegree{1, 0}, Bidegree{0, 1}, Bidegree{1, 1}}) {
      SerrePairingReport pr;
      try {
        pr = serre_pairing(s.model, b, ab);
      } catch (const Error& e) {
        all_ok = false;
        rep.checks.push_back(CheckResult{"serre k=" + std::to_string(k) + " " + ab.str(),
                                         false, "1", e.what()});
        continue;
      }
      if (pr.dim_primal != pr.dim_dual) dual_dims = false;
      Json j;
      j["bundle"] = k;
      j["bidegree"] = ab.str();
      j["dim"] = pr.dim_primal;
      j["dim_dual"] = pr.dim_dual;
      j["rank"] = pr.rank;
      j["nondegenerate"] = pr.nondegenerate;
      rep.certificates.push_back({"serre", j});
    }
  }
  rep.checks.push_back(CheckResult{"serre_nondegenerate", all_ok, all_ok ? "0" : "1", ""});
  rep.checks.push_back(CheckResult{"serre_dual_dimension_identity", dual_dims,
                                   dual_dims ? "0" : "1", ""});
  return rep;
}

}  // namespace

Report run_verify(const RunConfig& cfg) {
  cfg.validate();
  return cfg.mode == Mode::Exact ? verify_impl<Rational>(cfg)
                                 : verify_impl<BigFloat>(cfg);
}

Report run_cohomology(const RunConfig& cfg) {
  cfg.validate();
  return cfg.mode == Mode::Exact ? cohomology_impl<Rational>(cfg)
                                 : cohomology_impl<BigFloat>(cfg);
}

Report run_serre(const RunConfig& cfg) {
  cfg.validate();
  return cfg.mode == Mode::Exact ? serre_impl<Rational>(cfg)
                                 : serre_impl<BigFloat>(cfg);
}

}  // namespace qk
