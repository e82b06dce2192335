#pragma once

#include "qkahler/lefschetz.hpp"
#include "qkahler/qcp1.hpp"

namespace qk {

// Hermitian structure on a line bundle E_k: a positive multiple of the
// canonical h(f-bar)(g) = g f^*. The induced sesquilinear form per block is
// the (scaled) Haar Gram of the slice.
template <class F>
struct HermitianStructure {
  int bundle = 0;
  F scale{};  // positive
  std::map<HalfInt, Matrix<F>> induced_gram;

  bool symmetric(F* residual = nullptr) const {
    F worst{};
    for (const auto& [l, g] : induced_gram) {
      F r = (g - g.dagger()).max_abs();
      if (worst < r) worst = r;
    }
    if (residual) *residual = worst;
    return FieldOps<F>::is_zero(worst) || worst <= F(1e-25);
  }
  bool positive(const PivotPolicy<F>& pp) const {
    for (const auto& [l, g] : induced_gram)
      if (!is_positive_definite(g, pp)) return false;
    return true;
  }
};

template <class F>
HermitianStructure<F> hermitian_structure(const Model<F>& model, int k) {
  HermitianStructure<F> h;
  h.bundle = k;
  int lowest = std::abs(k);
  if (lowest > model.twolmax())
    throw Error(ErrorKind::ConfigError, "bundle beyond cutoff");
  Matrix<F> g0 = model.haar_gram(k, lowest);
  Cx<F> tr;
  for (std::size_t i = 0; i < g0.rows(); ++i) tr += g0(i, i);
  if (!FieldOps<F>::is_zero(tr.im) && FieldOps<F>::mode == Mode::Exact)
    throw Error(ErrorKind::NotPositiveDefinite, "h trace not real");
  if (!(tr.re > F(0)))
    throw Error(ErrorKind::NotPositiveDefinite, "h trace not positive");
  h.scale = F(1) / tr.re;
  for (int twol = lowest; twol <= model.twolmax(); twol += 2)
    h.induced_gram[HalfInt(twol)] = model.haar_gram(k, twol) * Cx<F>(h.scale);
  return h;
}

// Everything the Hodge/Nakano machinery needs about the twisted complex of
// E_k, with the dual complex living on space(-k).
template <class F>
struct TwistedBundle {
  int k = 0;
  int n = 1;
  SpacePtr space, dual_space;
  HermitianStructure<F> h;

  std::shared_ptr<LefschetzPair<F>> pair;       // (space(k), kappa wedge -)
  std::shared_ptr<LefschetzPair<F>> dual_pair;  // (space(-k), - wedge kappa)

  BlockMap<F> dbar, del;             // global differentials on space(k)
  BlockMap<F> lef, lam, hodge, counting;
  BlockMap<F> conj_h, conj_h_inv;    // antilinear, C_h and its inverse
  BlockMap<F> hodge_bar;             // *bar_F: space(k) -> space(-k)
  BlockMap<F> hodge_bar_back;        // *bar_{veeF}: space(-k) -> space(k)
  BlockMap<F> dbar_dag, del_dag;     // formula codifferentials
  BlockMap<F> dual_dbar;             // differential of the dual complex
  BlockMap<F> dual_dbar_dag;         // its codifferential, on space(-k)

  std::map<std::pair<Bidegree, HalfInt>, Matrix<F>> gram;

  PivotPolicy<F> pp;

  const Matrix<F>& gram_part(Bidegree ab, HalfInt l) const {
    static const Matrix<F> empty;
    auto it = gram.find({ab, l});
    return it == gram.end() ? empty : it->second;
  }
  Cx<F> inner(const Element<F>& x, const Element<F>& y) const {
    Cx<F> acc;
    for (const auto& [key, xv] : x.parts) {
      auto it = y.parts.find(key);
      if (it == y.parts.end()) continue;
      acc += form_value(gram.at(key), xv, it->second);
    }
    return acc;
  }
};

// g_F(alpha, beta) = vol(alpha ^ev *bar_F(beta)) as an element of M.
template <class F>
AlgebraElement<F> hermitian_metric(const Model<F>& model,
                                   const TwistedBundle<F>& b,
                                   const ModelForm<F>& alpha,
                                   const ModelForm<F>& beta) {
  Element<F> be = model.to_element(b.k, beta);
  ModelForm<F> sb = model.to_form(-b.k, b.hodge_bar.apply(be));
  return model.vol(model.mul(alpha, sb));
}

template <class F>
TwistedBundle<F> make_bundle(const Model<F>& model, int k) {
  TwistedBundle<F> b;
  b.k = k;
  b.space = model.space(k);
  b.dual_space = model.space(-k);
  b.h = hermitian_structure(model, k);
  b.pp = model.pivot_policy();

  b.dbar = model.dbar_map(k);
  b.del = model.del_map(k);
  b.lef = model.lef_left_map(k);
  b.pair = std::make_shared<LefschetzPair<F>>(b.space, b.lef, Bidegree{1, 1},
                                              1, true, b.pp);
  b.dual_pair = std::make_shared<LefschetzPair<F>>(
      b.dual_space, model.lef_right_map(-k), Bidegree{1, 1}, 1, true, b.pp);

  b.hodge = b.pair->hodge_map(HodgeVariant::Bidegree);
  b.lam = b.pair->dual_lefschetz(HodgeVariant::Bidegree);
  b.counting = b.pair->counting_operator();

  Cx<F> scale = Cx<F>(b.h.scale);
  b.conj_h = model.star_map(k) * scale;
  b.conj_h_inv = model.star_map(-k) * (Cx<F>::one() / scale);

  BlockMap<F> dual_hodge = b.dual_pair->hodge_map(HodgeVariant::Bidegree);
  b.hodge_bar = dual_hodge.compose(b.conj_h);
  b.hodge_bar_back = b.hodge.compose(b.conj_h_inv);

  b.dual_dbar = model.dbar_map(-k);
  b.dbar_dag =
      (b.hodge_bar_back.compose(b.dual_dbar).compose(b.hodge_bar)) * (-Cx<F>::one());
  b.del_dag = (b.hodge_bar_back.compose(model.del_map(-k)).compose(b.hodge_bar)) *
              (-Cx<F>::one());
  b.dual_dbar_dag =
      (b.hodge_bar.compose(b.dbar).compose(b.hodge_bar_back)) * (-Cx<F>::one());

  // inner products: <x,y> = f(vol(x ^ev *bar y)), computed on basis pairs
  for (const auto& [ab, blocks] : b.space->components()) {
    for (const auto& blk : blocks) {
      Matrix<F> g(blk.dim, blk.dim);
      std::vector<ModelForm<F>> forms;
      std::vector<ModelForm<F>> starred;
      for (std::size_t i = 0; i < blk.dim; ++i) {
        forms.push_back(model.basis_form(k, ab, blk.label, i));
        Element<F> e = Element<F>::basis_vector(b.space, ab, blk.label, i);
        starred.push_back(model.to_form(-k, b.hodge_bar.apply(e)));
      }
      for (std::size_t i = 0; i < blk.dim; ++i)
        for (std::size_t j = 0; j < blk.dim; ++j)
          g(i, j) = model.integral(model.mul(forms[i], starred[j]));
      b.gram[{ab, blk.label}] = std::move(g);
    }
  }
  return b;
}

// Adjoint with respect to the block inner products: the independent oracle
// against the formula codifferentials.
template <class F>
BlockMap<F> gram_adjoint(const TwistedBundle<F>& b, const BlockMap<F>& t) {
  if (t.antilinear())
    throw Error(ErrorKind::ShapeMismatch, "gram_adjoint of antilinear map");
  BlockMap<F> out(t.target(), t.source());
  for (const auto& [key, m] : t.parts()) {
    const auto& [from, to, l] = key;
    const Matrix<F>& gf = b.gram.at({from, l});
    const Matrix<F>& gt = b.gram.at({to, l});
    // <T x, y>_to = <x, T* y>_from with <u,v> = u^T G conj(v):
    // T*_part = conj(G_from)^{-1} T^H conj(G_to)
    Matrix<F> adj = inverse(gf.conj_entries(), b.pp) * m.dagger() * gt.conj_entries();
    out.set_part(to, from, l, std::move(adj));
  }
  return out;
}

// max |<d a, b> - <a, d^+ b>| over block basis pairs
template <class F>
F adjointness_residual(const TwistedBundle<F>& b, const BlockMap<F>& op,
                       const BlockMap<F>& opdag) {
  F worst{};
  for (const auto& [key, m] : op.parts()) {
    const auto& [from, to, l] = key;
    std::size_t nf = b.space->dim(from, l);
    std::size_t nt = b.space->dim(to, l);
    for (std::size_t i = 0; i < nf; ++i) {
      Element<F> x = Element<F>::basis_vector(b.space, from, l, i);
      Element<F> ox = op.apply(x);
      for (std::size_t j = 0; j < nt; ++j) {
        Element<F> y = Element<F>::basis_vector(b.space, to, l, j);
        Cx<F> lhs = b.inner(ox, y);
        Cx<F> rhs = b.inner(x, opdag.apply(y));
        F r = (lhs - rhs).mag();
        if (worst < r) worst = r;
      }
    }
  }
  return worst;
}

// Stokes vanishing of the closed integral on random-ish basis pairs:
// integral(dbar(alpha ^ev beta)) = integral(del(alpha ^ev beta)) = 0.
template <class F>
F stokes_residual(const Model<F>& model, int k, const ModelForm<F>& alpha,
                  const ModelForm<F>& beta) {
  ModelForm<F> w = model.mul(alpha, beta);
  F r1 = model.integral(model.dbar(w)).mag();
  F r2 = model.integral(model.del(w)).mag();
  return r1 < r2 ? r2 : r1;
}

}  // namespace qk
