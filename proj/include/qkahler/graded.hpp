#pragma once

#include "qkahler/linalg.hpp"

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace qk {

// Half-integer block labels, stored as twice the value.
class HalfInt {
public:
  HalfInt() = default;
  explicit HalfInt(int twice) : twice_(twice) {}
  static HalfInt of_int(int n) { return HalfInt(2 * n); }
  int twice() const { return twice_; }
  bool is_integer() const { return twice_ % 2 == 0; }
  auto operator<=>(const HalfInt&) const = default;
  HalfInt operator+(const HalfInt& o) const { return HalfInt(twice_ + o.twice_); }
  HalfInt operator-(const HalfInt& o) const { return HalfInt(twice_ - o.twice_); }
  std::string str() const {
    if (twice_ % 2 == 0) return std::to_string(twice_ / 2);
    return std::to_string(twice_) + "/2";
  }
  static HalfInt parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return of_int(std::stoi(s));
    int num = std::stoi(s.substr(0, slash));
    int den = std::stoi(s.substr(slash + 1));
    if (den != 2 || num % 2 == 0)
      throw Error(ErrorKind::ConfigError, "not a half-integer: " + s);
    return HalfInt(num);
  }

private:
  int twice_ = 0;
};

struct Bidegree {
  int a = 0;
  int b = 0;
  auto operator<=>(const Bidegree&) const = default;
  int total() const { return a + b; }
  Bidegree operator+(const Bidegree& o) const { return {a + o.a, b + o.b}; }
  std::string str() const {
    return "(" + std::to_string(a) + "," + std::to_string(b) + ")";
  }
};

struct Block {
  HalfInt label;
  std::size_t dim = 0;
  auto operator<=>(const Block&) const = default;
};

// Finite-dimensional bigraded space with Peter-Weyl blocks per component.
// Absent components/blocks are zero.
class BigradedSpace {
public:
  BigradedSpace() = default;

  void add_block(Bidegree bd, HalfInt label, std::size_t dim) {
    if (dim == 0) return;
    auto& blocks = components_[bd];
    for (const auto& b : blocks)
      if (b.label == label)
        throw Error(ErrorKind::Internal, "duplicate block label in component");
    blocks.push_back({label, dim});
  }

  const std::map<Bidegree, std::vector<Block>>& components() const {
    return components_;
  }
  std::size_t dim(Bidegree bd, HalfInt label) const {
    auto it = components_.find(bd);
    if (it == components_.end()) return 0;
    for (const auto& b : it->second)
      if (b.label == label) return b.dim;
    return 0;
  }
  std::size_t component_dim(Bidegree bd) const {
    auto it = components_.find(bd);
    if (it == components_.end()) return 0;
    std::size_t n = 0;
    for (const auto& b : it->second) n += b.dim;
    return n;
  }
  std::size_t total_dim() const {
    std::size_t n = 0;
    for (const auto& [bd, blocks] : components_)
      for (const auto& b : blocks) n += b.dim;
    return n;
  }
  std::vector<HalfInt> labels(Bidegree bd) const {
    std::vector<HalfInt> out;
    auto it = components_.find(bd);
    if (it == components_.end()) return out;
    for (const auto& b : it->second) out.push_back(b.label);
    return out;
  }
  std::vector<HalfInt> all_labels() const {
    std::map<HalfInt, bool> seen;
    for (const auto& [bd, blocks] : components_)
      for (const auto& b : blocks) seen[b.label] = true;
    std::vector<HalfInt> out;
    for (const auto& [l, _] : seen) out.push_back(l);
    return out;
  }
  int max_total_degree() const {
    int d = 0;
    for (const auto& [bd, blocks] : components_)
      if (bd.total() > d) d = bd.total();
    return d;
  }
  bool operator==(const BigradedSpace& o) const {
    return components_ == o.components_;
  }

private:
  std::map<Bidegree, std::vector<Block>> components_;
};

using SpacePtr = std::shared_ptr<const BigradedSpace>;

// Element of a bigraded space: one coordinate vector per (component, block).
template <class F>
struct Element {
  SpacePtr space;
  std::map<std::pair<Bidegree, HalfInt>, Vec<F>> parts;

  static Element zero(SpacePtr s) { return Element{std::move(s), {}}; }

  static Element basis_vector(SpacePtr s, Bidegree bd, HalfInt l, std::size_t i) {
    Element e{s, {}};
    Vec<F> v(s->dim(bd, l));
    v.at(i) = Cx<F>::one();
    e.parts[{bd, l}] = std::move(v);
    return e;
  }

  Vec<F> coords(Bidegree bd, HalfInt l) const {
    auto it = parts.find({bd, l});
    if (it != parts.end()) return it->second;
    return Vec<F>(space->dim(bd, l));
  }

  bool is_zero() const {
    for (const auto& [k, v] : parts)
      for (const auto& x : v)
        if (!x.is_zero()) return false;
    return true;
  }
  F max_abs() const {
    F m{};
    for (const auto& [k, v] : parts)
      for (const auto& x : v) {
        F a = x.mag();
        if (m < a) m = a;
      }
    return m;
  }
  Element& accumulate(const Element& o, const Cx<F>& c) {
    for (const auto& [k, v] : o.parts) {
      auto& dst = parts[k];
      if (dst.empty()) dst.assign(v.size(), Cx<F>::zero());
      for (std::size_t i = 0; i < v.size(); ++i) dst[i] += c * v[i];
    }
    return *this;
  }
  Element operator+(const Element& o) const {
    Element e = *this;
    return e.accumulate(o, Cx<F>::one());
  }
  Element operator-(const Element& o) const {
    Element e = *this;
    return e.accumulate(o, -Cx<F>::one());
  }
  Element operator*(const Cx<F>& c) const {
    Element e = zero(space);
    e.accumulate(*this, c);
    return e;
  }
};

// Linear (or conjugate-linear) map between bigraded spaces, block-preserving
// in the Peter-Weyl label, with per-(source component, target component,
// block) matrices. Fixed-shift operators are the common case; the Hodge map
// and friends use degree-dependent targets.
template <class F>
class BlockMap {
public:
  BlockMap() = default;
  BlockMap(SpacePtr src, SpacePtr dst, bool antilinear = false)
      : src_(std::move(src)), dst_(std::move(dst)), antilinear_(antilinear) {}

  static BlockMap zero(SpacePtr s, SpacePtr d) { return BlockMap(s, d); }

  static BlockMap identity(SpacePtr s) {
    BlockMap m(s, s);
    for (const auto& [bd, blocks] : s->components())
      for (const auto& b : blocks)
        m.set_part(bd, bd, b.label, Matrix<F>::identity(b.dim));
    return m;
  }

  // scalar * id on a single component
  static BlockMap component_scalar(SpacePtr s, SpacePtr d, Bidegree from,
                                   Bidegree to, const Cx<F>& c) {
    BlockMap m(s, d);
    auto it = s->components().find(from);
    if (it == s->components().end()) return m;
    for (const auto& b : it->second) {
      std::size_t dim = d->dim(to, b.label);
      if (dim != b.dim)
        throw Error(ErrorKind::ShapeMismatch, "component_scalar dim mismatch");
      m.set_part(from, to, b.label, Matrix<F>::identity(b.dim) * c);
    }
    return m;
  }

  const SpacePtr& source() const { return src_; }
  const SpacePtr& target() const { return dst_; }
  bool antilinear() const { return antilinear_; }

  void set_part(Bidegree from, Bidegree to, HalfInt l, Matrix<F> m) {
    if (m.is_zero()) return;
    if (m.cols() != src_->dim(from, l) || m.rows() != dst_->dim(to, l))
      throw Error(ErrorKind::ShapeMismatch,
                  "block part shape mismatch at " + from.str() + "->" +
                      to.str() + " l=" + l.str());
    parts_[{from, to, l}] = std::move(m);
  }
  const std::map<std::tuple<Bidegree, Bidegree, HalfInt>, Matrix<F>>& parts() const {
    return parts_;
  }
  Matrix<F> part(Bidegree from, Bidegree to, HalfInt l) const {
    auto it = parts_.find({from, to, l});
    if (it != parts_.end()) return it->second;
    return Matrix<F>(dst_->dim(to, l), src_->dim(from, l));
  }

  Element<F> apply(const Element<F>& e) const {
    if (!(*e.space == *src_))
      throw Error(ErrorKind::ShapeMismatch, "apply: wrong source space");
    Element<F> out = Element<F>::zero(dst_);
    for (const auto& [key, m] : parts_) {
      const auto& [from, to, l] = key;
      auto it = e.parts.find({from, l});
      if (it == e.parts.end()) continue;
      Vec<F> v = it->second;
      if (antilinear_)
        for (auto& x : v) x = x.conj();
      Vec<F> img = m.apply(v);
      auto& dst = out.parts[{to, l}];
      if (dst.empty()) dst.assign(img.size(), Cx<F>::zero());
      for (std::size_t i = 0; i < img.size(); ++i) dst[i] += img[i];
    }
    return out;
  }

  // this . g  (apply g first)
  BlockMap compose(const BlockMap& g) const {
    if (!(*g.dst_ == *src_))
      throw Error(ErrorKind::ShapeMismatch, "compose: inner spaces differ");
    BlockMap out(g.src_, dst_, antilinear_ != g.antilinear_);
    for (const auto& [kf, mf] : parts_) {
      const auto& [mid_f, to, l] = kf;
      for (const auto& [kg, mg] : g.parts_) {
        const auto& [from, mid_g, lg] = kg;
        if (!(mid_g == mid_f) || !(lg == l)) continue;
        Matrix<F> rhs = antilinear_ ? mg.conj_entries() : mg;
        Matrix<F> prod = mf * rhs;
        if (prod.is_zero()) continue;
        auto key = std::make_tuple(from, to, l);
        auto it = out.parts_.find(key);
        if (it == out.parts_.end())
          out.parts_[key] = std::move(prod);
        else
          it->second = it->second + prod;
      }
    }
    return out;
  }

  BlockMap operator+(const BlockMap& o) const { return combined(o, Cx<F>::one()); }
  BlockMap operator-(const BlockMap& o) const { return combined(o, -Cx<F>::one()); }
  BlockMap operator*(const Cx<F>& c) const {
    BlockMap out(src_, dst_, antilinear_);
    for (const auto& [k, m] : parts_) {
      Matrix<F> s = m * c;
      if (!s.is_zero()) out.parts_[k] = std::move(s);
    }
    return out;
  }

  bool is_zero() const {
    for (const auto& [k, m] : parts_)
      if (!m.is_zero()) return false;
    return true;
  }
  F max_abs() const {
    F out{};
    for (const auto& [k, m] : parts_) {
      F v = m.max_abs();
      if (out < v) out = v;
    }
    return out;
  }

private:
  BlockMap combined(const BlockMap& o, const Cx<F>& c) const {
    if (!(*src_ == *o.src_) || !(*dst_ == *o.dst_) || antilinear_ != o.antilinear_)
      throw Error(ErrorKind::ShapeMismatch, "block map sum mismatch");
    BlockMap out = *this;
    for (const auto& [k, m] : o.parts_) {
      auto it = out.parts_.find(k);
      if (it == out.parts_.end())
        out.parts_[k] = m * c;
      else
        it->second = it->second + m * c;
    }
    for (auto it = out.parts_.begin(); it != out.parts_.end();) {
      if (it->second.is_zero())
        it = out.parts_.erase(it);
      else
        ++it;
    }
    return out;
  }

  SpacePtr src_, dst_;
  bool antilinear_ = false;
  std::map<std::tuple<Bidegree, Bidegree, HalfInt>, Matrix<F>> parts_;
};

// [f,g] = f.g - (-1)^{|f||g|} g.f with the given total degrees.
template <class F>
BlockMap<F> graded_commutator(const BlockMap<F>& f, const BlockMap<F>& g,
                              int deg_f, int deg_g) {
  Cx<F> sign = (deg_f * deg_g) % 2 == 0 ? Cx<F>::one() : -Cx<F>::one();
  return f.compose(g) - g.compose(f) * sign;
}

// Residual of f - g (max entry magnitude of the difference).
template <class F>
F residual(const BlockMap<F>& f, const BlockMap<F>& g) {
  return (f - g).max_abs();
}

}  // namespace qk
