#pragma once

#include "qkahler/hermitian.hpp"

namespace qk {

template <class F>
struct DiracPackage {
  BlockMap<F> dirac;      // D = dbar_F + dbar_F^+
  BlockMap<F> laplacian;  // D^2
  F dirac_vs_square_residual{};  // D^2 vs dbar^+ dbar + dbar dbar^+
};

template <class F>
DiracPackage<F> dirac_package(const TwistedBundle<F>& b) {
  DiracPackage<F> p;
  p.dirac = b.dbar + b.dbar_dag;
  p.laplacian = p.dirac.compose(p.dirac);
  BlockMap<F> alt = b.dbar_dag.compose(b.dbar) + b.dbar.compose(b.dbar_dag);
  p.dirac_vs_square_residual = residual(p.laplacian, alt);
  return p;
}

// Laplacian of the dual complex (on space(-k)).
template <class F>
BlockMap<F> dual_laplacian(const TwistedBundle<F>& b) {
  return b.dual_dbar_dag.compose(b.dual_dbar) +
         b.dual_dbar.compose(b.dual_dbar_dag);
}

// Basis of ker(Delta) restricted to one bidegree, per block, deterministic.
template <class F>
std::vector<Element<F>> harmonic_space(const TwistedBundle<F>& b,
                                       const BlockMap<F>& laplacian,
                                       SpacePtr space, Bidegree ab) {
  std::vector<Element<F>> out;
  auto comp = space->components().find(ab);
  if (comp == space->components().end()) return out;
  for (const auto& blk : comp->second) {
    Matrix<F> part = laplacian.part(ab, ab, blk.label);
    for (const auto& v : kernel_basis(part, b.pp)) {
      Element<F> e = Element<F>::zero(space);
      e.parts[{ab, blk.label}] = v;
      out.push_back(std::move(e));
    }
  }
  return out;
}

template <class F>
std::vector<Element<F>> harmonic_space(const TwistedBundle<F>& b, Bidegree ab) {
  DiracPackage<F> p = dirac_package(b);
  return harmonic_space(b, p.laplacian, b.space, ab);
}

// dim ker dbar - rank(incoming dbar), summed over blocks: the quotient path.
template <class F>
std::size_t cohomology_dim_quotient(const TwistedBundle<F>& b, Bidegree ab) {
  std::size_t total = 0;
  Bidegree below{ab.a, ab.b - 1};
  auto comp = b.space->components().find(ab);
  if (comp == b.space->components().end()) return 0;
  Bidegree above{ab.a, ab.b + 1};
  for (const auto& blk : comp->second) {
    Matrix<F> out_part = b.dbar.part(ab, above, blk.label);
    Matrix<F> in_part = b.dbar.part(below, ab, blk.label);
    std::size_t kd = blk.dim - rank(out_part, b.pp);
    std::size_t im = rank(in_part, b.pp);
    total += kd - im;
  }
  return total;
}

template <class F>
std::size_t cohomology_dim_harmonic(const TwistedBundle<F>& b, Bidegree ab) {
  return harmonic_space(b, ab).size();
}

struct HodgeDecompositionReport {
  bool dims_add = false;
  std::string orthogonality_residual;
  std::size_t harmonic = 0, image_d = 0, image_ddag = 0, total = 0;
};

// Component = harmonics + im dbar + im dbar^+, pairwise orthogonal.
template <class F>
HodgeDecompositionReport hodge_decomposition(const TwistedBundle<F>& b,
                                             Bidegree ab) {
  DiracPackage<F> p = dirac_package(b);
  HodgeDecompositionReport rep;
  rep.total = b.space->component_dim(ab);
  rep.harmonic = harmonic_space(b, p.laplacian, b.space, ab).size();
  Bidegree below{ab.a, ab.b - 1}, above{ab.a, ab.b + 1};
  F ortho{};
  auto comp = b.space->components().find(ab);
  if (comp == b.space->components().end()) {
    rep.dims_add = true;
    rep.orthogonality_residual = "0";
    return rep;
  }
  for (const auto& blk : comp->second) {
    Matrix<F> din = b.dbar.part(below, ab, blk.label);
    Matrix<F> ddagin = b.dbar_dag.part(above, ab, blk.label);
    rep.image_d += rank(din, b.pp);
    rep.image_ddag += rank(ddagin, b.pp);
    // orthogonality residuals between the three families
    const Matrix<F>& g = b.gram_part(ab, blk.label);
    std::vector<Vec<F>> harm;
    for (const auto& v : kernel_basis(p.laplacian.part(ab, ab, blk.label), b.pp))
      harm.push_back(v);
    auto cols = [](const Matrix<F>& m) {
      std::vector<Vec<F>> out;
      for (std::size_t c = 0; c < m.cols(); ++c) {
        Vec<F> v(m.rows());
        for (std::size_t r = 0; r < m.rows(); ++r) v[r] = m(r, c);
        out.push_back(std::move(v));
      }
      return out;
    };
    auto imd = cols(din);
    auto imdd = cols(ddagin);
    auto pairwise = [&](const std::vector<Vec<F>>& xs,
                        const std::vector<Vec<F>>& ys) {
      for (const auto& x : xs)
        for (const auto& y : ys) {
          F r = form_value(g, x, y).mag();
          if (ortho < r) ortho = r;
        }
    };
    pairwise(harm, imd);
    pairwise(harm, imdd);
    pairwise(imd, imdd);
  }
  rep.dims_add = (rep.harmonic + rep.image_d + rep.image_ddag == rep.total);
  rep.orthogonality_residual = FieldOps<F>::str(ortho);
  if (!rep.dims_add)
    throw Error(ErrorKind::DecompositionGap,
                "Hodge decomposition dimensions do not add at " + ab.str());
  return rep;
}

struct DiagonalizabilityReport {
  bool certified = false;
  std::string self_adjoint_residual;
  std::string witness_block;
};

// D self-adjoint w.r.t. a positive definite block inner product certifies
// blockwise diagonalizability without eigenvalue computations.
template <class F>
DiagonalizabilityReport diagonalizability_certificate(const TwistedBundle<F>& b) {
  DiracPackage<F> p = dirac_package(b);
  DiagonalizabilityReport rep;
  F worst{};
  std::string witness;
  for (const auto& [key, g] : b.gram) {
    if (!is_positive_definite(g, b.pp)) {
      rep.certified = false;
      rep.witness_block = key.first.str() + " l=" + key.second.str();
      rep.self_adjoint_residual = "inner product not positive definite";
      return rep;
    }
  }
  F r = adjointness_residual(b, p.dirac, p.dirac);
  rep.self_adjoint_residual = FieldOps<F>::str(r);
  bool ok;
  if constexpr (FieldOps<F>::mode == Mode::Exact)
    ok = FieldOps<F>::is_zero(r);
  else
    ok = r <= b.pp.tol;
  rep.certified = ok;
  if (!ok) rep.witness_block = "dirac self-adjointness";
  return rep;
}

struct SerrePairingReport {
  std::size_t dim_primal = 0, dim_dual = 0, rank = 0;
  bool nondegenerate = false;
  std::string well_defined_residual;
  std::string positivity_ok;
};

// Pairing H^{(a,b)}(E_k) x H^{(n-a,n-b)}(vee E_k) -> C by integrating ^ev.
template <class F>
SerrePairingReport serre_pairing(const Model<F>& model, const TwistedBundle<F>& b,
                                 Bidegree ab) {
  SerrePairingReport rep;
  Bidegree cd{b.n - ab.a, b.n - ab.b};
  DiracPackage<F> p = dirac_package(b);
  auto hp = harmonic_space(b, p.laplacian, b.space, ab);
  BlockMap<F> dual_lap = dual_laplacian(b);
  auto hd = harmonic_space(b, dual_lap, b.dual_space, cd);
  rep.dim_primal = hp.size();
  rep.dim_dual = hd.size();
  Matrix<F> pairing(hp.size(), hd.size());
  for (std::size_t i = 0; i < hp.size(); ++i) {
    ModelForm<F> a = model.to_form(b.k, hp[i]);
    for (std::size_t j = 0; j < hd.size(); ++j) {
      ModelForm<F> be = model.to_form(-b.k, hd[j]);
      pairing(i, j) = model.integral(model.mul(a, be));
    }
  }
  rep.rank = hp.empty() || hd.empty() ? 0 : rank(pairing, b.pp);
  rep.nondegenerate = rep.dim_primal == rep.dim_dual && rep.rank == rep.dim_primal;

  // well-definedness: adding a dbar-exact representative leaves values fixed
  F wd{};
  if (!hp.empty()) {
    Bidegree below{ab.a, ab.b - 1};
    auto comp = b.space->components().find(below);
    if (comp != b.space->components().end() && !comp->second.empty()) {
      Element<F> z = Element<F>::basis_vector(b.space, below,
                                              comp->second.front().label, 0);
      Element<F> exact = b.dbar.apply(z);
      ModelForm<F> ex = model.to_form(b.k, exact);
      for (std::size_t j = 0; j < hd.size(); ++j) {
        ModelForm<F> be = model.to_form(-b.k, hd[j]);
        F r = model.integral(model.mul(ex, be)).mag();
        if (wd < r) wd = r;
      }
    }
  }
  rep.well_defined_residual = FieldOps<F>::str(wd);

  // ([alpha], *bar[alpha]) = <alpha, alpha> > 0
  bool pos = true;
  for (const auto& alpha : hp) {
    ModelForm<F> a = model.to_form(b.k, alpha);
    ModelForm<F> sa = model.to_form(-b.k, b.hodge_bar.apply(alpha));
    Cx<F> val = model.integral(model.mul(a, sa));
    Cx<F> ip = b.inner(alpha, alpha);
    if (val != ip || !(ip.re > F(0))) pos = false;
  }
  rep.positivity_ok = pos ? "yes" : "no";
  if (!rep.nondegenerate && !(hp.empty() && hd.empty()))
    throw Error(ErrorKind::DegeneratePairing,
                "Serre pairing degenerate at " + ab.str() + " twist " +
                    std::to_string(b.k));
  return rep;
}

// Delta_dual o *bar_F = *bar_F o Delta, per block.
template <class F>
F laplacian_intertwine_residual(const TwistedBundle<F>& b) {
  DiracPackage<F> p = dirac_package(b);
  BlockMap<F> lhs = dual_laplacian(b).compose(b.hodge_bar);
  BlockMap<F> rhs = b.hodge_bar.compose(p.laplacian);
  return residual(lhs, rhs);
}

struct CohomologyRow {
  int bundle = 0;
  std::size_t h00 = 0, h10 = 0, h01 = 0, h11 = 0;
  std::string cutoff;
};

template <class F>
CohomologyRow cohomology_row(const TwistedBundle<F>& b, const std::string& cutoff) {
  CohomologyRow row;
  row.bundle = b.k;
  row.cutoff = cutoff;
  DiracPackage<F> p = dirac_package(b);
  row.h00 = harmonic_space(b, p.laplacian, b.space, {0, 0}).size();
  row.h10 = harmonic_space(b, p.laplacian, b.space, {1, 0}).size();
  row.h01 = harmonic_space(b, p.laplacian, b.space, {0, 1}).size();
  row.h11 = harmonic_space(b, p.laplacian, b.space, {1, 1}).size();
  return row;
}

}  // namespace qk
