#pragma once

#include "qkahler/graded.hpp"

#include <cmath>

namespace qk {

enum class Normalization { Triangular, Unitary };

template <class F>
F field_pow(const F& x, int k) {
  F out(1);
  F base = x;
  int e = k < 0 ? -k : k;
  for (int i = 0; i < e; ++i) out *= base;
  if (k < 0) out = F(1) / out;
  return out;
}

// [m]_q = (q^m - q^-m)/(q - q^-1)
template <class F>
F q_integer(const F& q, int m) {
  F qi = F(1) / q;
  return (field_pow(q, m) - field_pow(qi, m)) / (q - qi);
}

// Element of the truncated Peter-Weyl coefficient algebra: coefficients on the
// basis T^l_{m,n} with l,m,n stored twice (integers).
template <class F>
struct AlgebraElement {
  // twol -> (twom, twon) -> coefficient
  std::map<int, std::map<std::pair<int, int>, Cx<F>>> terms;

  static AlgebraElement unit() { return basis(0, 0, 0); }
  static AlgebraElement basis(int twol, int twom, int twon,
                              Cx<F> c = Cx<F>::one()) {
    AlgebraElement e;
    if (!c.is_zero()) e.terms[twol][{twom, twon}] = std::move(c);
    return e;
  }

  bool is_zero() const {
    for (const auto& [l, mm] : terms)
      for (const auto& [k, c] : mm)
        if (!c.is_zero()) return false;
    return true;
  }
  void add_term(int twol, int twom, int twon, const Cx<F>& c) {
    if (c.is_zero()) return;
    auto& slot = terms[twol][{twom, twon}];
    slot += c;
  }
  AlgebraElement& accumulate(const AlgebraElement& o, const Cx<F>& c) {
    for (const auto& [l, mm] : o.terms)
      for (const auto& [k, v] : mm) add_term(l, k.first, k.second, c * v);
    return *this;
  }
  AlgebraElement operator+(const AlgebraElement& o) const {
    AlgebraElement e = *this;
    e.accumulate(o, Cx<F>::one());
    return e;
  }
  AlgebraElement operator*(const Cx<F>& c) const {
    AlgebraElement e;
    e.accumulate(*this, c);
    return e;
  }
  Cx<F> coefficient(int twol, int twom, int twon) const {
    auto it = terms.find(twol);
    if (it == terms.end()) return Cx<F>::zero();
    auto jt = it->second.find({twom, twon});
    return jt == it->second.end() ? Cx<F>::zero() : jt->second;
  }
  void prune() {
    for (auto it = terms.begin(); it != terms.end();) {
      for (auto jt = it->second.begin(); jt != it->second.end();)
        jt = jt->second.is_zero() ? it->second.erase(jt) : std::next(jt);
      it = it->second.empty() ? terms.erase(it) : std::next(it);
    }
  }
  F max_abs() const {
    F m{};
    for (const auto& [l, mm] : terms)
      for (const auto& [k, c] : mm) {
        F v = c.mag();
        if (m < v) m = v;
      }
    return m;
  }
};

// The quantized coefficient algebra of SU(2): irreducible blocks with ladder
// actions, products via Clebsch-Gordan data, the star involution and the Haar
// state. The triangular normalization keeps every structure constant rational;
// the unitary one needs square roots and is only available over the
// approximate field.
template <class F>
class CoefficientAlgebra {
public:
  CoefficientAlgebra(F q, Normalization norm)
      : q_(std::move(q)), norm_(norm) {
    if (FieldOps<F>::is_zero(q_) || q_ == F(1) || q_ < F(0))
      throw Error(ErrorKind::InvalidQ, "q must be positive and != 1");
    if (norm_ == Normalization::Unitary && FieldOps<F>::mode == Mode::Exact)
      throw Error(ErrorKind::ConfigError,
                  "unitary normalization requires the approximate field");
  }

  const F& q() const { return q_; }
  Normalization normalization() const { return norm_; }
  F qpow(int k) const { return field_pow(q_, k); }
  F qint(int m) const { return q_integer(q_, m); }

  static std::vector<int> block_weights(int twol) {
    std::vector<int> w;
    for (int n = -twol; n <= twol; n += 2) w.push_back(n);
    return w;
  }

  // ladder coefficients on V_l: E v_n = e(l,n) v_{n+1}, F v_n = f(l,n) v_{n-1}
  F ladder_e(int twol, int twon) const {
    int a = (twol - twon) / 2;
    if (norm_ == Normalization::Triangular) return qint(a);
    return sqrt_checked(qint(a) * qint((twol + twon) / 2 + 1));
  }
  F ladder_f(int twol, int twon) const {
    int a = (twol + twon) / 2;
    if (norm_ == Normalization::Triangular) return qint(a);
    return sqrt_checked(qint(a) * qint((twol - twon) / 2 + 1));
  }

  // right-action ladder maps on an element, acting on the n index
  AlgebraElement<F> act_e(const AlgebraElement<F>& x) const {
    AlgebraElement<F> out;
    for (const auto& [l, mm] : x.terms)
      for (const auto& [k, c] : mm)
        if (k.second < l)
          out.add_term(l, k.first, k.second + 2, c * Cx<F>(ladder_e(l, k.second)));
    return out;
  }
  // the FK ladder: v_n -> q^{2n} f(l,n) v_{n-1}
  AlgebraElement<F> act_fk(const AlgebraElement<F>& x) const {
    AlgebraElement<F> out;
    for (const auto& [l, mm] : x.terms)
      for (const auto& [k, c] : mm)
        if (k.second > -l)
          out.add_term(l, k.first, k.second - 2,
                       c * Cx<F>(qpow(k.second) * ladder_f(l, k.second)));
    return out;
  }
  AlgebraElement<F> act_k(const AlgebraElement<F>& x) const {
    AlgebraElement<F> out;
    for (const auto& [l, mm] : x.terms)
      for (const auto& [k, c] : mm)
        out.add_term(l, k.first, k.second, c * Cx<F>(qpow(k.second)));
    return out;
  }
  // weight scaling q^{p * w} used when coefficients cross frame generators
  AlgebraElement<F> weight_scale(const AlgebraElement<F>& x, int p) const {
    if (p == 0) return x;
    AlgebraElement<F> out;
    for (const auto& [l, mm] : x.terms)
      for (const auto& [k, c] : mm)
        out.add_term(l, k.first, k.second, c * Cx<F>(qpow(p * k.second)));
    return out;
  }

  AlgebraElement<F> mul(const AlgebraElement<F>& x, const AlgebraElement<F>& y) const {
    AlgebraElement<F> out;
    for (const auto& [la, ma] : x.terms)
      for (const auto& [lb, mb] : y.terms) {
        const CgTable& t = cg(la, lb);
        for (const auto& [k1, c1] : ma)
          for (const auto& [k2, c2] : mb) {
            Cx<F> c12 = c1 * c2;
            if (c12.is_zero()) continue;
            for (const auto& [twol, io] : t.blocks) {
              const auto& [iota, pi] = io;
              for (int jm = 0; jm <= twol; ++jm) {
                auto im = iota[jm].find({k1.first, k2.first});
                if (im == iota[jm].end()) continue;
                for (int jn = 0; jn <= twol; ++jn) {
                  auto ip = pi[jn].find({k1.second, k2.second});
                  if (ip == pi[jn].end()) continue;
                  out.add_term(twol, -twol + 2 * jm, -twol + 2 * jn,
                               c12 * im->second * ip->second);
                }
              }
            }
          }
      }
    out.prune();
    return out;
  }

  // conjugate-linear involution; block l built recursively out of products of
  // blocks l-1/2 and 1/2, seeded by the standard star on the generators.
  AlgebraElement<F> star(const AlgebraElement<F>& x) const {
    AlgebraElement<F> out;
    for (const auto& [l, mm] : x.terms)
      for (const auto& [k, c] : mm)
        out.add_term(l, -k.first, -k.second, c.conj() * star_coefficient(l, k.first, k.second));
    return out;
  }

  // Haar state: the coefficient of the unit block.
  Cx<F> haar(const AlgebraElement<F>& x) const { return x.coefficient(0, 0, 0); }

  // modular automorphism sigma(T^l_{mn}) = q^{2(m+n)} T^l_{mn}; the Haar
  // state satisfies h(xy) = h(y sigma(x)).
  AlgebraElement<F> modular(const AlgebraElement<F>& x) const {
    AlgebraElement<F> out;
    for (const auto& [l, mm] : x.terms)
      for (const auto& [k, c] : mm)
        out.add_term(l, k.first, k.second, c * Cx<F>(qpow(k.first + k.second)));
    return out;
  }

  struct CgTable {
    // per twol: iota columns j=0..twol mapping (twon1,twon2)->coeff, and pi rows
    std::map<int, std::pair<std::vector<std::map<std::pair<int, int>, Cx<F>>>,
                            std::vector<std::map<std::pair<int, int>, Cx<F>>>>> blocks;
  };

  const CgTable& cg(int twola, int twolb) const {
    auto key = std::make_pair(twola, twolb);
    auto it = cg_cache_.find(key);
    if (it != cg_cache_.end()) return it->second;
    return cg_cache_.emplace(key, build_cg(twola, twolb)).first->second;
  }

private:
  using WeightVec = std::map<std::pair<int, int>, Cx<F>>;

  static F sqrt_checked(const F& x) {
    if constexpr (FieldOps<F>::mode == Mode::Approx) {
      using std::sqrt;
      return sqrt(x);
    } else {
      throw Error(ErrorKind::ConfigError, "sqrt in exact mode");
    }
  }

  WeightVec tens_e(int twola, int twolb, const WeightVec& v) const {
    WeightVec out;
    for (const auto& [k, c] : v) {
      auto [n1, n2] = k;
      if (n1 < twola) {
        Cx<F> t = c * Cx<F>(ladder_e(twola, n1) * qpow(n2));
        if (!t.is_zero()) out[{n1 + 2, n2}] += t;
      }
      if (n2 < twolb) {
        Cx<F> t = c * Cx<F>(ladder_e(twolb, n2));
        if (!t.is_zero()) out[{n1, n2 + 2}] += t;
      }
    }
    return out;
  }
  WeightVec tens_f(int twola, int twolb, const WeightVec& v) const {
    WeightVec out;
    for (const auto& [k, c] : v) {
      auto [n1, n2] = k;
      if (n1 > -twola) {
        Cx<F> t = c * Cx<F>(ladder_f(twola, n1));
        if (!t.is_zero()) out[{n1 - 2, n2}] += t;
      }
      if (n2 > -twolb) {
        Cx<F> t = c * Cx<F>(qpow(-n1) * ladder_f(twolb, n2));
        if (!t.is_zero()) out[{n1, n2 - 2}] += t;
      }
    }
    return out;
  }

  CgTable build_cg(int twola, int twolb) const {
    CgTable table;
    std::vector<std::pair<int, int>> pairs;
    for (int n1 = -twola; n1 <= twola; n1 += 2)
      for (int n2 = -twolb; n2 <= twolb; n2 += 2) pairs.push_back({n1, n2});

    PivotPolicy<F> pp = pivot_policy();
    for (int twol = twola + twolb; twol >= std::abs(twola - twolb); twol -= 2) {
      // lowest-weight vector: kernel of Delta(F) on the weight -twol space
      std::vector<std::pair<int, int>> wsp, tgt;
      for (auto p : pairs) {
        if (p.first + p.second == -twol) wsp.push_back(p);
        if (p.first + p.second == -twol - 2) tgt.push_back(p);
      }
      Matrix<F> m(tgt.size(), wsp.size());
      for (std::size_t c = 0; c < wsp.size(); ++c) {
        WeightVec img = tens_f(twola, twolb, {{wsp[c], Cx<F>::one()}});
        for (std::size_t r = 0; r < tgt.size(); ++r) {
          auto it = img.find(tgt[r]);
          if (it != img.end()) m(r, c) = it->second;
        }
      }
      auto ker = kernel_basis(m, pp);
      if (ker.size() != 1)
        throw Error(ErrorKind::Internal, "CG lowest-weight space not 1-dimensional");
      WeightVec w;
      Cx<F> pivot;
      if constexpr (FieldOps<F>::mode == Mode::Exact) {
        for (std::size_t i = 0; i < wsp.size() && pivot.is_zero(); ++i)
          pivot = ker[0][i];
      } else {
        F best{};
        for (std::size_t i = 0; i < wsp.size(); ++i)
          if (ker[0][i].mag() > best) { best = ker[0][i].mag(); pivot = ker[0][i]; }
      }
      for (std::size_t i = 0; i < wsp.size(); ++i)
        if (!ker[0][i].is_zero()) w[wsp[i]] = ker[0][i] / pivot;

      std::vector<WeightVec> cols{w};
      WeightVec cur = w;
      Cx<F> prod = Cx<F>::one();
      for (int j = 1; j <= twol; ++j) {
        cur = tens_e(twola, twolb, cur);
        prod *= Cx<F>(ladder_e(twol, -twol + 2 * (j - 1)));
        WeightVec scaled;
        for (const auto& [k, c] : cur) scaled[k] = c / prod;
        cols.push_back(scaled);
      }
      table.blocks[twol] = {cols, {}};
    }

    // projections: invert the change of basis per weight space
    for (auto& [twol, io] : table.blocks) io.second.resize(twol + 1);
    for (int wt = -(twola + twolb); wt <= twola + twolb; wt += 2) {
      std::vector<std::pair<int, int>> wsp;
      for (auto p : pairs)
        if (p.first + p.second == wt) wsp.push_back(p);
      if (wsp.empty()) continue;
      std::vector<std::pair<int, int>> colids;  // (twol, j)
      for (const auto& [twol, io] : table.blocks)
        for (int j = 0; j <= twol; ++j)
          if (-twol + 2 * j == wt) colids.push_back({twol, j});
      if (colids.size() != wsp.size())
        throw Error(ErrorKind::Internal, "CG weight-space dimension mismatch");
      std::size_t nn = wsp.size();
      Matrix<F> b(nn, nn);
      for (std::size_t cj = 0; cj < nn; ++cj) {
        const auto& col = table.blocks[colids[cj].first].first[colids[cj].second];
        for (std::size_t ri = 0; ri < nn; ++ri) {
          auto it = col.find(wsp[ri]);
          if (it != col.end()) b(ri, cj) = it->second;
        }
      }
      Matrix<F> binv = inverse(b, pivot_policy());
      for (std::size_t cj = 0; cj < nn; ++cj) {
        WeightVec row;
        for (std::size_t ri = 0; ri < nn; ++ri)
          if (!binv(cj, ri).is_zero()) row[wsp[ri]] = binv(cj, ri);
        table.blocks[colids[cj].first].second[colids[cj].second] = std::move(row);
      }
    }
    return table;
  }

  PivotPolicy<F> pivot_policy() const {
    if constexpr (FieldOps<F>::mode == Mode::Exact)
      return PivotPolicy<F>::exact();
    else
      return PivotPolicy<F>::with_tol(F(1e-30));
  }

  Cx<F> star_coefficient(int twol, int twom, int twon) const {
    if (twol == 0) return Cx<F>::one();
    auto key = std::make_tuple(twol, twom, twon);
    auto it = star_cache_.find(key);
    if (it != star_cache_.end()) return it->second;
    Cx<F> sigma;
    if (twol == 1) {
      // seed: a* = d, b* = -q c, c* = -q^{-1} b, d* = a
      int e = (twon - twom) / 2;
      sigma = Cx<F>(qpow(e));
      if (e % 2 != 0) sigma = -sigma;
    } else {
      // expand T^l_{mn} through products of blocks l-1/2 and 1/2, star the
      // factors in reverse order, and read off the block-l coefficient
      int a = twol - 1, b = 1;
      const CgTable& t = cg(a, b);
      const auto& [iota, pi] = t.blocks.at(twol);
      int jm = (twom + twol) / 2, jn = (twon + twol) / 2;
      AlgebraElement<F> acc;
      for (const auto& [mk, cm] : pi[jm])
        for (const auto& [nk, cn] : iota[jn]) {
          Cx<F> coeff = (cm * cn).conj();
          AlgebraElement<F> sb = AlgebraElement<F>::basis(
              b, -mk.second, -nk.second, star_coefficient(b, mk.second, nk.second));
          AlgebraElement<F> sa = AlgebraElement<F>::basis(
              a, -mk.first, -nk.first, star_coefficient(a, mk.first, nk.first));
          acc.accumulate(mul(sb, sa) * coeff, Cx<F>::one());
        }
      acc.prune();
      sigma = acc.coefficient(twol, -twom, -twon);
      // consistency: nothing may leak outside the expected single term
      for (const auto& [l, mm] : acc.terms)
        for (const auto& [k, c] : mm)
          if ((l != twol || k.first != -twom || k.second != -twon) &&
              !negligible(c))
            throw Error(ErrorKind::Internal, "star recursion inconsistent");
    }
    star_cache_[key] = sigma;
    return sigma;
  }

  bool negligible(const Cx<F>& c) const {
    if constexpr (FieldOps<F>::mode == Mode::Exact)
      return c.is_zero();
    else
      return c.mag() < F(1e-35);
  }

  F q_;
  Normalization norm_;
  mutable std::map<std::pair<int, int>, CgTable> cg_cache_;
  mutable std::map<std::tuple<int, int, int>, Cx<F>> star_cache_;
};

}  // namespace qk
