#pragma once

#include "qkahler/su2.hpp"

#include <array>

namespace qk {

// Frame words of the rank-2 calculus: 1, e+, e-, e+e-. Coefficients sit to
// the LEFT of the frames; crossing a frame scales a weight-w coefficient by
// q^w, and e-e+ = -q^2 e+e-.
enum class Frame { One, Ep, Em, EpEm };

inline Bidegree frame_bidegree(Frame f) {
  switch (f) {
    case Frame::One: return {0, 0};
    case Frame::Ep: return {1, 0};
    case Frame::Em: return {0, 1};
    case Frame::EpEm: return {1, 1};
  }
  return {0, 0};
}
inline int frame_degree(Frame f) { return frame_bidegree(f).total(); }

inline const std::array<Frame, 4>& all_frames() {
  static const std::array<Frame, 4> fs{Frame::One, Frame::Ep, Frame::Em,
                                       Frame::EpEm};
  return fs;
}

// A differential form (possibly bundle-valued) in the global frame-slice
// representation: one coefficient-algebra element per frame word.
template <class F>
struct ModelForm {
  std::map<Frame, AlgebraElement<F>> parts;

  static ModelForm wrap(Frame f, AlgebraElement<F> x) {
    ModelForm m;
    if (!x.is_zero()) m.parts[f] = std::move(x);
    return m;
  }
  static ModelForm scalar(AlgebraElement<F> x) {
    return wrap(Frame::One, std::move(x));
  }
  bool is_zero() const {
    for (const auto& [f, x] : parts)
      if (!x.is_zero()) return false;
    return true;
  }
  ModelForm& accumulate(const ModelForm& o, const Cx<F>& c) {
    for (const auto& [f, x] : o.parts) parts[f].accumulate(x, c);
    return *this;
  }
  ModelForm operator+(const ModelForm& o) const {
    ModelForm m = *this;
    m.accumulate(o, Cx<F>::one());
    return m;
  }
  ModelForm operator-(const ModelForm& o) const {
    ModelForm m = *this;
    m.accumulate(o, -Cx<F>::one());
    return m;
  }
  ModelForm operator*(const Cx<F>& c) const {
    ModelForm m;
    m.accumulate(*this, c);
    return m;
  }
  F max_abs() const {
    F out{};
    for (const auto& [f, x] : parts) {
      F v = x.max_abs();
      if (out < v) out = v;
    }
    return out;
  }
};

// The q-deformed projective line: Peter-Weyl blocks of the quantum SU(2)
// algebra, line-bundle slices E_k, the two-dimensional covariant calculus in
// frame form, the coinvariant Kahler form and the Haar state.
//
// Conventions (w(n) = 2n, block label l stored as 2l):
//   dbar x = (x <| E) e-        with E-ladder [l-n]
//   del  x = (x <| FK) e+       with ladder q^{2n} [l+n]
//   e+- x  = q^{w(x)} x e+-,    e- e+ = -q^2 e+ e-
//   (e+)* = -(1/q) e-, (e-)* = -q e+
//   kappa  = -i q e+ e-  (real, central on degree-0, normalized so that the
//            curvature of E_1 equals the Lefschetz operator)
// The slice of component (a,b) of the twisted complex of E_k is E_{k-2a+2b}.
template <class F>
class Model {
public:
  Model(F q, int twolmax, Normalization norm = Normalization::Triangular,
        F tol = default_tol())
      : alg_(std::move(q), norm), twolmax_(twolmax), tol_(std::move(tol)) {
    if (twolmax_ < 0) throw Error(ErrorKind::ConfigError, "negative cutoff");
  }

  static F default_tol() {
    if constexpr (FieldOps<F>::mode == Mode::Exact)
      return F(0);
    else
      return F("1e-25");
  }

  const CoefficientAlgebra<F>& algebra() const { return alg_; }
  int twolmax() const { return twolmax_; }
  const F& q() const { return alg_.q(); }

  static int slice_weight(int k, Bidegree ab) { return k - 2 * ab.a + 2 * ab.b; }

  // ----- spaces -----
  SpacePtr space(int k) const {
    auto it = spaces_.find(k);
    if (it != spaces_.end()) return it->second;
    auto sp = std::make_shared<BigradedSpace>();
    for (Frame f : all_frames()) {
      Bidegree ab = frame_bidegree(f);
      int w = slice_weight(k, ab);
      for (int twol = std::abs(w); twol <= twolmax_; twol += 2)
        sp->add_block(ab, HalfInt(twol), static_cast<std::size_t>(twol) + 1);
    }
    spaces_[k] = sp;
    return sp;
  }

  std::map<HalfInt, std::size_t> line_bundle_dims(int k) const {
    std::map<HalfInt, std::size_t> out;
    for (int twol = std::abs(k); twol <= twolmax_; twol += 2)
      out[HalfInt(twol)] = static_cast<std::size_t>(twol) + 1;
    return out;
  }

  // ----- frame calculus -----
  ModelForm<F> mul(const ModelForm<F>& x, const ModelForm<F>& y) const {
    ModelForm<F> out;
    for (const auto& [fi, xi] : x.parts)
      for (const auto& [fj, yj] : y.parts) {
        auto [coeff, fk, ok] = frame_product(fi, fj);
        if (!ok) continue;
        AlgebraElement<F> crossed = alg_.weight_scale(yj, frame_degree(fi));
        out.parts[fk].accumulate(alg_.mul(xi, crossed), coeff);
      }
    prune(out);
    return out;
  }

  ModelForm<F> star(const ModelForm<F>& x) const {
    ModelForm<F> out;
    for (const auto& [f, xf] : x.parts) {
      auto [coeff, g] = frame_star(f);
      AlgebraElement<F> s = alg_.star(xf);
      s = alg_.weight_scale(s, frame_degree(g));
      out.parts[g].accumulate(s, coeff);
    }
    prune(out);
    return out;
  }

  ModelForm<F> dbar(const ModelForm<F>& x) const {
    ModelForm<F> out;
    for (const auto& [f, xf] : x.parts) {
      auto [coeff, fk, ok] = frame_product(Frame::Em, f);
      if (!ok) continue;
      out.parts[fk].accumulate(alg_.act_e(xf), coeff);
    }
    prune(out);
    return out;
  }

  ModelForm<F> del(const ModelForm<F>& x) const {
    ModelForm<F> out;
    for (const auto& [f, xf] : x.parts) {
      auto [coeff, fk, ok] = frame_product(Frame::Ep, f);
      if (!ok) continue;
      out.parts[fk].accumulate(alg_.act_fk(xf), coeff);
    }
    prune(out);
    return out;
  }

  ModelForm<F> d_total(const ModelForm<F>& x) const { return dbar(x) + del(x); }

  ModelForm<F> kappa() const {
    return ModelForm<F>::wrap(Frame::EpEm,
                              AlgebraElement<F>::unit() * kappa_coeff());
  }
  Cx<F> kappa_coeff() const { return Cx<F>(F(0), -alg_.q()); }  // i * (-q)

  // volume: Omega^{(1,1)} (weight-0 slice) -> M, normalized so vol(*_H 1) = 1
  AlgebraElement<F> vol(const ModelForm<F>& x) const {
    auto it = x.parts.find(Frame::EpEm);
    if (it == x.parts.end()) return {};
    return it->second * (Cx<F>::one() / kappa_coeff());
  }
  Cx<F> state(const AlgebraElement<F>& m) const { return alg_.haar(m); }
  Cx<F> integral(const ModelForm<F>& x) const { return state(vol(x)); }

  // ----- conversions between forms and space elements -----
  ModelForm<F> basis_form(int k, Bidegree ab, HalfInt l, std::size_t i) const {
    int w = slice_weight(k, ab);
    int twol = l.twice();
    int twom = -twol + 2 * static_cast<int>(i);
    return ModelForm<F>::wrap(bidegree_frame(ab),
                              AlgebraElement<F>::basis(twol, twom, w));
  }

  Element<F> to_element(int k, const ModelForm<F>& x) const {
    SpacePtr sp = space(k);
    Element<F> e = Element<F>::zero(sp);
    for (const auto& [f, xf] : x.parts) {
      Bidegree ab = frame_bidegree(f);
      int w = slice_weight(k, ab);
      for (const auto& [twol, mm] : xf.terms)
        for (const auto& [mn, c] : mm) {
          if (c.is_zero()) continue;
          if (mn.second != w || twol > twolmax_)
            throw Error(ErrorKind::ShapeMismatch,
                        "form does not live on the twisted complex of E_" +
                            std::to_string(k));
          auto& v = e.parts[{ab, HalfInt(twol)}];
          if (v.empty()) v.assign(static_cast<std::size_t>(twol) + 1, Cx<F>::zero());
          v[(mn.first + twol) / 2] += c;
        }
    }
    return e;
  }

  ModelForm<F> to_form(int k, const Element<F>& e) const {
    ModelForm<F> out;
    for (const auto& [key, v] : e.parts) {
      const auto& [ab, l] = key;
      int w = slice_weight(k, ab);
      for (std::size_t i = 0; i < v.size(); ++i)
        if (!v[i].is_zero())
          out.parts[bidegree_frame(ab)].add_term(
              l.twice(), -l.twice() + 2 * static_cast<int>(i), w, v[i]);
    }
    return out;
  }

  // ----- operator matrices on the twisted complex of E_k -----
  BlockMap<F> dbar_map(int k) const {
    return build_map(k, k, [this](const ModelForm<F>& x) { return dbar(x); });
  }
  BlockMap<F> del_map(int k) const {
    return build_map(k, k, [this](const ModelForm<F>& x) { return del(x); });
  }
  // primal Lefschetz: kappa wedged from the left
  BlockMap<F> lef_left_map(int k) const {
    return build_map(k, k,
                     [this](const ModelForm<F>& x) { return mul(kappa(), x); });
  }
  // Lefschetz of the dual-side complex: kappa from the right
  BlockMap<F> lef_right_map(int k) const {
    return build_map(k, k,
                     [this](const ModelForm<F>& x) { return mul(x, kappa()); });
  }
  // global star as an antilinear map space(k) -> space(-k)
  BlockMap<F> star_map(int k) const {
    BlockMap<F> m(space(k), space(-k), /*antilinear=*/true);
    fill_map(k, -k, m, [this](const ModelForm<F>& x) { return star(x); });
    return m;
  }

  // ----- model data -----
  // Haar Gram of the slice E_w, block l: B(i,j) = h(T_i T_j^*)
  Matrix<F> haar_gram(int w, int twol) const {
    Matrix<F> g(twol + 1, twol + 1);
    for (int i = 0; i <= twol; ++i) {
      AlgebraElement<F> x = AlgebraElement<F>::basis(twol, -twol + 2 * i, w);
      for (int j = 0; j <= twol; ++j) {
        AlgebraElement<F> y = AlgebraElement<F>::basis(twol, -twol + 2 * j, w);
        g(i, j) = alg_.haar(alg_.mul(x, alg_.star(y)));
      }
    }
    return g;
  }

  // basis of the joint span of k-fold products of the degree +1 generators;
  // spans ker dbar on E_k (k >= 0)
  std::vector<AlgebraElement<F>> quantum_minors(int k) const {
    if (k < 0) throw Error(ErrorKind::ConfigError, "quantum_minors needs k >= 0");
    std::vector<AlgebraElement<F>> words{AlgebraElement<F>::unit()};
    AlgebraElement<F> z1 = AlgebraElement<F>::basis(1, -1, 1);
    AlgebraElement<F> z2 = AlgebraElement<F>::basis(1, 1, 1);
    for (int step = 0; step < k; ++step) {
      std::vector<AlgebraElement<F>> next;
      for (const auto& w : words) {
        next.push_back(alg_.mul(w, z1));
        next.push_back(alg_.mul(w, z2));
      }
      words = std::move(next);
    }
    // reduce to a basis of the span (coordinates in the lowest block slice)
    Matrix<F> coords(words.size(), static_cast<std::size_t>(k) + 1);
    for (std::size_t r = 0; r < words.size(); ++r)
      for (int j = 0; j <= k; ++j)
        coords(r, j) = words[r].coefficient(k, -k + 2 * j, k);
    std::vector<AlgebraElement<F>> basis;
    std::vector<std::size_t> chosen;
    for (std::size_t r = 0; r < words.size(); ++r) {
      Matrix<F> trial(chosen.size() + 1, static_cast<std::size_t>(k) + 1);
      for (std::size_t i = 0; i < chosen.size(); ++i)
        for (int j = 0; j <= k; ++j) trial(i, j) = coords(chosen[i], j);
      for (int j = 0; j <= k; ++j) trial(chosen.size(), j) = coords(r, j);
      if (rank(trial) == chosen.size() + 1) {
        chosen.push_back(r);
        basis.push_back(words[r]);
      }
      if (static_cast<int>(chosen.size()) == k + 1) break;
    }
    return basis;
  }

  // dual basis element of the line bundle E_k: pairs (u_i, p_i) with
  // sum u_i p_i = 1, u_i in E_{-k}, p_i in E_k (lowest blocks)
  std::vector<std::pair<AlgebraElement<F>, AlgebraElement<F>>>
  dual_basis_element(int k) const {
    int a = std::abs(k);
    std::vector<AlgebraElement<F>> us, ps;
    for (int i = 0; i <= a; ++i) {
      us.push_back(AlgebraElement<F>::basis(a, -a + 2 * i, -k));
      ps.push_back(AlgebraElement<F>::basis(a, -a + 2 * i, k));
    }
    // unknown coefficients c_{ij} with sum c_{ij} u_i p_j = 1
    std::vector<std::pair<int, int>> unknowns;
    std::vector<AlgebraElement<F>> prods;
    for (int i = 0; i <= a; ++i)
      for (int j = 0; j <= a; ++j) {
        unknowns.push_back({i, j});
        prods.push_back(alg_.mul(us[i], ps[j]));
      }
    std::map<std::tuple<int, int, int>, std::size_t> rows;
    for (const auto& p : prods)
      for (const auto& [l, mm] : p.terms)
        for (const auto& [mn, c] : mm)
          rows.try_emplace({l, mn.first, mn.second}, rows.size());
    Matrix<F> m(rows.size(), unknowns.size());
    Vec<F> rhs(rows.size());
    for (std::size_t c = 0; c < prods.size(); ++c)
      for (const auto& [l, mm] : prods[c].terms)
        for (const auto& [mn, v] : mm)
          m(rows.at({l, mn.first, mn.second}), c) = v;
    auto unit_row = rows.find({0, 0, 0});
    if (unit_row == rows.end())
      throw Error(ErrorKind::Internal, "unit not reachable in dual basis solve");
    rhs[unit_row->second] = Cx<F>::one();
    auto sol = solve(m, rhs, pivot_policy());
    if (!sol)
      throw Error(ErrorKind::Internal, "dual basis element does not exist");
    std::vector<std::pair<AlgebraElement<F>, AlgebraElement<F>>> out;
    for (std::size_t c = 0; c < unknowns.size(); ++c) {
      if ((*sol)[c].is_zero()) continue;
      auto [i, j] = unknowns[c];
      out.push_back({us[i] * (*sol)[c], ps[j]});
    }
    return out;
  }

  // residuals of the quantized enveloping-algebra relations on block l
  F block_relation_residual(int twol) const {
    std::size_t n = static_cast<std::size_t>(twol) + 1;
    Matrix<F> e(n, n), f(n, n), kmat(n, n), kinv(n, n);
    for (int i = 0; i <= twol; ++i) {
      int twon = -twol + 2 * i;
      if (twon < twol) e(i + 1, i) = Cx<F>(alg_.ladder_e(twol, twon));
      if (twon > -twol) f(i - 1, i) = Cx<F>(alg_.ladder_f(twol, twon));
      kmat(i, i) = Cx<F>(alg_.qpow(twon));
      kinv(i, i) = Cx<F>(alg_.qpow(-twon));
    }
    Cx<F> denom = Cx<F>(alg_.q() - F(1) / alg_.q());
    Matrix<F> r1 = e * f - f * e - (kmat - kinv) * (Cx<F>::one() / denom);
    Matrix<F> r2 = kmat * e * kinv - e * Cx<F>(alg_.qpow(2));
    Matrix<F> r3 = kmat * f * kinv - f * Cx<F>(alg_.qpow(-2));
    F out = r1.max_abs();
    if (out < r2.max_abs()) out = r2.max_abs();
    if (out < r3.max_abs()) out = r3.max_abs();
    return out;
  }

  PivotPolicy<F> pivot_policy() const {
    if constexpr (FieldOps<F>::mode == Mode::Exact)
      return PivotPolicy<F>::exact();
    else
      return PivotPolicy<F>::with_tol(tol_);
  }

private:
  static Frame bidegree_frame(Bidegree ab) {
    if (ab == Bidegree{0, 0}) return Frame::One;
    if (ab == Bidegree{1, 0}) return Frame::Ep;
    if (ab == Bidegree{0, 1}) return Frame::Em;
    if (ab == Bidegree{1, 1}) return Frame::EpEm;
    throw Error(ErrorKind::ShapeMismatch, "no frame for bidegree " + ab.str());
  }

  // e_I * e_J reduced to the canonical order; mu = q^2
  std::tuple<Cx<F>, Frame, bool> frame_product(Frame a, Frame b) const {
    if (a == Frame::One) return {Cx<F>::one(), b, true};
    if (b == Frame::One) return {Cx<F>::one(), a, true};
    if (a == Frame::Ep && b == Frame::Em) return {Cx<F>::one(), Frame::EpEm, true};
    if (a == Frame::Em && b == Frame::Ep)
      return {-Cx<F>(alg_.qpow(2)), Frame::EpEm, true};
    return {Cx<F>::zero(), Frame::One, false};
  }

  std::pair<Cx<F>, Frame> frame_star(Frame f) const {
    switch (f) {
      case Frame::One: return {Cx<F>::one(), Frame::One};
      case Frame::Ep: return {-Cx<F>(F(1) / alg_.q()), Frame::Em};
      case Frame::Em: return {-Cx<F>(alg_.q()), Frame::Ep};
      case Frame::EpEm: return {-Cx<F>::one(), Frame::EpEm};
    }
    return {Cx<F>::zero(), Frame::One};
  }

  static void prune(ModelForm<F>& m) {
    for (auto it = m.parts.begin(); it != m.parts.end();) {
      it->second.prune();
      it = it->second.terms.empty() ? m.parts.erase(it) : std::next(it);
    }
  }

  template <class Op>
  BlockMap<F> build_map(int ksrc, int kdst, Op&& op) const {
    BlockMap<F> m(space(ksrc), space(kdst));
    fill_map(ksrc, kdst, m, std::forward<Op>(op));
    return m;
  }

  // For antilinear targets the matrix columns are the images of the basis
  // vectors; the antilinear flag on the BlockMap conjugates inputs on apply.
  template <class Op>
  void fill_map(int ksrc, int kdst, BlockMap<F>& m, Op&& op) const {
    SpacePtr src = space(ksrc);
    // accumulate column images, then set per (from,to,l) matrices
    std::map<std::tuple<Bidegree, Bidegree, HalfInt>, Matrix<F>> mats;
    for (const auto& [ab, blocks] : src->components()) {
      for (const auto& blk : blocks) {
        for (std::size_t i = 0; i < blk.dim; ++i) {
          ModelForm<F> x = basis_form(ksrc, ab, blk.label, i);
          Element<F> img = to_element(kdst, op(x));
          for (const auto& [key, v] : img.parts) {
            const auto& [to, l2] = key;
            if (!(l2 == blk.label))
              throw Error(ErrorKind::Internal, "operator not block-preserving");
            auto mk = std::make_tuple(ab, to, blk.label);
            auto it = mats.find(mk);
            if (it == mats.end())
              it = mats.emplace(mk, Matrix<F>(v.size(), blk.dim)).first;
            for (std::size_t r = 0; r < v.size(); ++r)
              it->second(r, i) = v[r];
          }
        }
      }
    }
    for (auto& [key, mat] : mats) {
      const auto& [from, to, l] = key;
      if (!mat.is_zero()) m.set_part(from, to, l, std::move(mat));
    }
  }

  CoefficientAlgebra<F> alg_;
  int twolmax_;
  F tol_{};
  mutable std::map<int, SpacePtr> spaces_;
};

}  // namespace qk
