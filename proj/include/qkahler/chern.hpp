#pragma once

#include "qkahler/hodge.hpp"

namespace qk {

template <class F>
struct ChernConnection {
  BlockMap<F> del_f;       // (1,0)-part: C_h^{-1} o dbar_{veeF} o C_h
  BlockMap<F> del_f_dag;   // its codifferential
  BlockMap<F> curvature;   // nabla^2 = (dbar + del_f)^2
  F del_f_square_residual{};
  F bidegree_residual{};   // parts of nabla^2 outside (a,b)->(a+1,b+1)
  F hermitian_identity_residual{};
};

template <class F>
bool pass_of(const F& r, const PivotPolicy<F>& pp) {
  if constexpr (FieldOps<F>::mode == Mode::Exact)
    return FieldOps<F>::is_zero(r);
  else
    return r <= pp.tol;
}

struct NamedResidual {
  std::string name;
  std::string residual;
  bool pass = false;
};

template <class F>
NamedResidual named_residual(const std::string& name, const F& r,
                             const PivotPolicy<F>& pp) {
  return NamedResidual{name, FieldOps<F>::str(r), pass_of(r, pp)};
}

// d h(f,g) = h(nabla f, g) + h(f, nabla g) on degree-0 basis pairs, with
// h(alpha, beta) = scale * alpha ^ (beta)^*.
template <class F>
F hermitian_connection_residual(const Model<F>& model, int k,
                                const BlockMap<F>& nabla, const F& scale) {
  F worst{};
  SpacePtr sp = model.space(k);
  auto comp = sp->components().find(Bidegree{0, 0});
  if (comp == sp->components().end()) return worst;
  Cx<F> s = Cx<F>(scale);
  for (const auto& blk : comp->second) {
    for (std::size_t i = 0; i < blk.dim; ++i) {
      ModelForm<F> f = model.basis_form(k, {0, 0}, blk.label, i);
      Element<F> fe = Element<F>::basis_vector(sp, {0, 0}, blk.label, i);
      ModelForm<F> nf = model.to_form(k, nabla.apply(fe));
      for (std::size_t j = 0; j < blk.dim; ++j) {
        ModelForm<F> g = model.basis_form(k, {0, 0}, blk.label, j);
        Element<F> ge = Element<F>::basis_vector(sp, {0, 0}, blk.label, j);
        ModelForm<F> ng = model.to_form(k, nabla.apply(ge));
        ModelForm<F> lhs = model.d_total(model.mul(f, model.star(g)) * s);
        ModelForm<F> rhs = (model.mul(nf, model.star(g)) +
                            model.mul(f, model.star(ng))) *
                           s;
        F r = (lhs - rhs).max_abs();
        if (worst < r) worst = r;
      }
    }
  }
  return worst;
}

template <class F>
ChernConnection<F> chern_connection(const Model<F>& model,
                                    const TwistedBundle<F>& b) {
  ChernConnection<F> c;
  c.del_f = b.conj_h_inv.compose(b.dual_dbar).compose(b.conj_h);
  c.del_f_dag = (b.hodge_bar_back.compose(model.del_map(-b.k)).compose(b.hodge_bar)) *
                (-Cx<F>::one());
  c.del_f_square_residual = c.del_f.compose(c.del_f).max_abs();
  BlockMap<F> nabla = b.dbar + c.del_f;
  c.curvature = nabla.compose(nabla);
  F bad{};
  for (const auto& [key, m] : c.curvature.parts()) {
    const auto& [from, to, l] = key;
    if (to.a != from.a + 1 || to.b != from.b + 1) {
      F v = m.max_abs();
      if (bad < v) bad = v;
    }
  }
  c.bidegree_residual = bad;
  c.hermitian_identity_residual =
      hermitian_connection_residual(model, b.k, nabla, b.h.scale);
  if (!pass_of(c.hermitian_identity_residual, b.pp))
    throw Error(ErrorKind::HermitianIdentityViolated,
                "Chern connection fails the Hermitian compatibility identity");
  return c;
}

// The four twisted Kahler identities, the anticommutators they imply, and the
// plain commutation relations they rest on. Returns (identity, residual).
template <class F>
std::vector<std::pair<std::string, F>> nakano_residuals(
    const TwistedBundle<F>& b, const ChernConnection<F>& c) {
  std::vector<std::pair<std::string, F>> out;
  const Cx<F> i = Cx<F>::i();
  auto comm = [](const BlockMap<F>& x, const BlockMap<F>& y) {
    return x.compose(y) - y.compose(x);
  };
  auto anti = [](const BlockMap<F>& x, const BlockMap<F>& y) {
    return x.compose(y) + y.compose(x);
  };
  out.push_back({"[L,del^+] = i dbar",
                 residual(comm(b.lef, c.del_f_dag), b.dbar * i)});
  out.push_back({"[L,dbar^+] = -i del",
                 residual(comm(b.lef, b.dbar_dag), c.del_f * (-i))});
  out.push_back({"[Lam,del] = i dbar^+",
                 residual(comm(b.lam, c.del_f), b.dbar_dag * i)});
  out.push_back({"[Lam,dbar] = -i del^+",
                 residual(comm(b.lam, b.dbar), c.del_f_dag * (-i))});
  out.push_back({"del dbar^+ + dbar^+ del = 0",
                 anti(c.del_f, b.dbar_dag).max_abs()});
  out.push_back({"del^+ dbar + dbar del^+ = 0",
                 anti(c.del_f_dag, b.dbar).max_abs()});
  out.push_back({"[L,del] = 0", comm(b.lef, c.del_f).max_abs()});
  out.push_back({"[L,dbar] = 0", comm(b.lef, b.dbar).max_abs()});
  out.push_back({"[Lam,del^+] = 0", comm(b.lam, c.del_f_dag).max_abs()});
  out.push_back({"[Lam,dbar^+] = 0", comm(b.lam, b.dbar_dag).max_abs()});
  return out;
}

template <class F>
std::vector<NamedResidual> verify_nakano(const TwistedBundle<F>& b,
                                         const ChernConnection<F>& c) {
  std::vector<NamedResidual> out;
  for (const auto& [name, r] : nakano_residuals(b, c))
    out.push_back(named_residual(name, r, b.pp));
  return out;
}

// Delta_del = Delta_dbar + [Lam, i nabla^2]
template <class F>
F akizuki_nakano_residual(const TwistedBundle<F>& b, const ChernConnection<F>& c) {
  BlockMap<F> lap_del =
      c.del_f.compose(c.del_f_dag) + c.del_f_dag.compose(c.del_f);
  BlockMap<F> lap_dbar =
      b.dbar.compose(b.dbar_dag) + b.dbar_dag.compose(b.dbar);
  BlockMap<F> inab2 = c.curvature * Cx<F>::i();
  BlockMap<F> bracket = b.lam.compose(inab2) - inab2.compose(b.lam);
  return residual(lap_del, lap_dbar + bracket);
}

template <class F>
NamedResidual verify_akizuki_nakano(const TwistedBundle<F>& b,
                                    const ChernConnection<F>& c) {
  return named_residual("Delta_del = Delta_dbar + [Lam, i nabla^2]",
                        akizuki_nakano_residual(b, c), b.pp);
}

struct PositivityCertificate {
  int bundle = 0;
  bool pass = false;
  bool proportional = false;   // i nabla^2 = s L_F exactly, s constant real
  bool kahler_positive = false;
  std::string scalar;          // the reported s
  std::string residual;
};

// Positive iff i nabla^2 equals wedging with a positive multiple of kappa;
// the scale is solved per block and must be constant, real and positive.
template <class F>
PositivityCertificate certify_positive(const TwistedBundle<F>& b,
                                       const ChernConnection<F>& c,
                                       bool kahler_positive) {
  PositivityCertificate cert;
  cert.bundle = b.k;
  cert.kahler_positive = kahler_positive;
  BlockMap<F> lhs = c.curvature * Cx<F>::i();
  std::optional<Cx<F>> s;
  F res{};
  for (const auto& [key, lm] : b.lef.parts()) {
    const auto& [from, to, l] = key;
    Matrix<F> m = lhs.part(from, to, l);
    // lef parts are nonzero scalar multiples of the identity
    if (!s) s = m(0, 0) / lm(0, 0);
    F r = (m - lm * (*s)).max_abs();
    if (res < r) res = r;
  }
  // nothing may live outside the Lefschetz components
  for (const auto& [key, m] : lhs.parts()) {
    if (b.lef.parts().count(key) == 0) {
      F r = m.max_abs();
      if (res < r) res = r;
    }
  }
  Cx<F> sval = s.value_or(Cx<F>::zero());
  F imag = FieldOps<F>::abs(sval.im);
  if (res < imag) res = imag;
  cert.scalar = sval.str();
  cert.proportional = pass_of(res, b.pp);
  cert.residual = FieldOps<F>::str(res);
  cert.pass = cert.proportional && kahler_positive && sval.re > F(0);
  return cert;
}

struct KodairaReport {
  int bundle = 0;
  bool vanishing = false;       // H^{(a,b)} = 0 for a+b > n, blocks <= cutoff
  bool sign_lemmas = false;     // <i nab^2 Lam a, a> <= 0 and <Lam i nab^2 a, a> >= 0
  std::string witness;
};

template <class F>
KodairaReport verify_kodaira(const TwistedBundle<F>& b,
                             const ChernConnection<F>& c) {
  KodairaReport rep;
  rep.bundle = b.k;
  rep.vanishing = true;
  DiracPackage<F> p = dirac_package(b);
  for (const auto& [ab, blocks] : b.space->components()) {
    if (ab.total() <= b.n) continue;
    auto h = harmonic_space(b, p.laplacian, b.space, ab);
    if (!h.empty()) {
      rep.vanishing = false;
      rep.witness = "harmonic form at " + ab.str();
    }
  }
  BlockMap<F> inab2 = c.curvature * Cx<F>::i();
  BlockMap<F> op1 = inab2.compose(b.lam);
  BlockMap<F> op2 = b.lam.compose(inab2);
  rep.sign_lemmas = true;
  for (const auto& [ab, blocks] : b.space->components()) {
    for (const auto& alpha : harmonic_space(b, p.laplacian, b.space, ab)) {
      Cx<F> v1 = b.inner(op1.apply(alpha), alpha);
      Cx<F> v2 = b.inner(op2.apply(alpha), alpha);
      bool ok1 = FieldOps<F>::is_zero(v1.im) && !(v1.re > F(0));
      bool ok2 = FieldOps<F>::is_zero(v2.im) && !(v2.re < F(0));
      if constexpr (FieldOps<F>::mode == Mode::Approx) {
        ok1 = FieldOps<F>::abs(v1.im) <= b.pp.tol && v1.re <= b.pp.tol;
        ok2 = FieldOps<F>::abs(v2.im) <= b.pp.tol && v2.re >= -b.pp.tol;
      }
      if (!ok1 || !ok2) {
        rep.sign_lemmas = false;
        rep.witness = "sign lemma at " + ab.str();
      }
    }
  }
  return rep;
}

struct InvertibleReport {
  int bundle = 0;
  std::size_t rank = 1;
  bool dual_basis_found = false;
  bool evaluation_surjective = false;
  bool invertible = false;
};

// Invertibility of a rank-1 bundle: the evaluation E_k (x) vee E_k -> M hits
// every block of M below the cutoff, and a dual basis element exists.
template <class F>
InvertibleReport check_invertible(const Model<F>& model, int k,
                                  std::size_t bundle_rank = 1) {
  InvertibleReport rep;
  rep.bundle = k;
  rep.rank = bundle_rank;
  if (bundle_rank != 1) {
    rep.invertible = false;
    return rep;
  }
  try {
    rep.dual_basis_found = !model.dual_basis_element(k).empty();
  } catch (const Error&) {
    rep.dual_basis_found = false;
  }
  // evaluation spans: products of blocks of E_k and E_{-k}
  rep.evaluation_surjective = true;
  auto pp = model.pivot_policy();
  for (int twol = 0; twol <= model.twolmax(); twol += 2) {
    // collect coordinates of products inside block twol of the slice w=0
    std::vector<Vec<F>> rows;
    for (int t1 = std::abs(k); t1 <= model.twolmax(); t1 += 2)
      for (int t2 = std::abs(k); t2 <= model.twolmax(); t2 += 2) {
        if (t1 + t2 < twol) continue;
        for (int i = 0; i <= t1; ++i)
          for (int j = 0; j <= t2; ++j) {
            auto prod = model.algebra().mul(
                AlgebraElement<F>::basis(t1, -t1 + 2 * i, k),
                AlgebraElement<F>::basis(t2, -t2 + 2 * j, -k));
            Vec<F> row(twol + 1);
            bool nz = false;
            for (int m = 0; m <= twol; ++m) {
              row[m] = prod.coefficient(twol, -twol + 2 * m, 0);
              if (!row[m].is_zero()) nz = true;
            }
            if (nz) rows.push_back(std::move(row));
          }
      }
    Matrix<F> mat(rows.size(), twol + 1);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (int cidx = 0; cidx <= twol; ++cidx) mat(r, cidx) = rows[r][cidx];
    if (rank(mat, pp) != static_cast<std::size_t>(twol) + 1)
      rep.evaluation_surjective = false;
  }
  rep.invertible = rep.dual_basis_found && rep.evaluation_surjective;
  return rep;
}

struct FanoReport {
  bool factorisable = false;
  bool canonical_invertible = false;
  bool anticanonical_positive = false;
  bool h01_trivial_vanishes = false;
  bool fano = false;
  int canonical_twist = 0;
  int anticanonical_twist = 0;
};

// factorisability: products of Omega^{(1,0)} x Omega^{(0,1)} (either order)
// span every block of Omega^{(1,1)} below the cutoff
template <class F>
bool factorisable(const Model<F>& model, bool flip_order) {
  auto pp = model.pivot_policy();
  for (int twol = 0; twol <= model.twolmax(); twol += 2) {
    std::vector<Vec<F>> rows;
    for (int t1 = 2; t1 <= model.twolmax(); t1 += 2)
      for (int t2 = 2; t2 <= model.twolmax(); t2 += 2) {
        if (t1 + t2 < twol) continue;
        for (int i = 0; i <= t1; ++i)
          for (int j = 0; j <= t2; ++j) {
            ModelForm<F> x = ModelForm<F>::wrap(
                Frame::Ep, AlgebraElement<F>::basis(t1, -t1 + 2 * i, -2));
            ModelForm<F> y = ModelForm<F>::wrap(
                Frame::Em, AlgebraElement<F>::basis(t2, -t2 + 2 * j, 2));
            ModelForm<F> prod = flip_order ? model.mul(y, x) : model.mul(x, y);
            auto it = prod.parts.find(Frame::EpEm);
            if (it == prod.parts.end()) continue;
            Vec<F> row(twol + 1);
            bool nz = false;
            for (int m = 0; m <= twol; ++m) {
              row[m] = it->second.coefficient(twol, -twol + 2 * m, 0);
              if (!row[m].is_zero()) nz = true;
            }
            if (nz) rows.push_back(std::move(row));
          }
      }
    Matrix<F> mat(rows.size(), twol + 1);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (int cidx = 0; cidx <= twol; ++cidx) mat(r, cidx) = rows[r][cidx];
    if (rank(mat, pp) != static_cast<std::size_t>(twol) + 1) return false;
  }
  return true;
}

}  // namespace qk
