#include "qkahler/hermitian.hpp"

#include <doctest.h>

#include <random>

using namespace qk;

namespace {
using CQ = Cx<Rational>;

Model<Rational>& model() {
  static Model<Rational> m(Rational(4, 5), 6);
  return m;
}

const TwistedBundle<Rational>& bundle(int k) {
  static std::map<int, TwistedBundle<Rational>> cache;
  auto it = cache.find(k);
  if (it == cache.end())
    it = cache.emplace(k, make_bundle(model(), k)).first;
  return it->second;
}

Element<Rational> random_element(std::mt19937_64& rng, SpacePtr sp) {
  Element<Rational> e = Element<Rational>::zero(sp);
  std::uniform_int_distribution<int> d(-3, 3);
  for (const auto& [bd, blocks] : sp->components())
    for (const auto& blk : blocks) {
      Vec<Rational> v(blk.dim);
      for (auto& x : v) x = CQ(Rational(d(rng)), Rational(d(rng)));
      e.parts[{bd, blk.label}] = v;
    }
  return e;
}
}  // namespace

TEST_CASE("hermitian structure data") {
  auto h0 = hermitian_structure(model(), 0);
  CHECK(h0.scale == Rational(1));  // trace of the unit block gram is 1
  CHECK(h0.symmetric());
  CHECK(h0.positive(PivotPolicy<Rational>::exact()));

  auto h1 = hermitian_structure(model(), 1);
  CHECK(h1.symmetric());
  CHECK(h1.positive(PivotPolicy<Rational>::exact()));
  // unit-trace normalization of the lowest block
  const Matrix<Rational>& g = h1.induced_gram.at(HalfInt(1));
  CHECK(g(0, 0) + g(1, 1) == CQ::one());
  // the slice gram is diagonal with equal entries here, so both are 1/2
  CHECK(g(0, 0) == CQ(Rational(1, 2)));
  CHECK(g(1, 1) == CQ(Rational(1, 2)));
}

TEST_CASE("conjugation map C_h") {
  const auto& b = bundle(1);
  std::mt19937_64 rng(61);

  SUBCASE("trivial bundle: C_h fixes the unit") {
    const auto& b0 = bundle(0);
    Element<Rational> one =
        Element<Rational>::basis_vector(b0.space, {0, 0}, HalfInt(0), 0);
    Element<Rational> img = b0.conj_h.apply(one);
    CHECK((img - one).is_zero());
  }

  SUBCASE("C_h^{-1} o C_h = id on random elements") {
    Element<Rational> x = random_element(rng, b.space);
    Element<Rational> back = b.conj_h_inv.apply(b.conj_h.apply(x));
    CHECK((back - x).is_zero());
  }

  SUBCASE("C_h is the h-scaled star map per block") {
    auto st = model().star_map(1);
    CHECK(residual(b.conj_h, st * CQ(b.h.scale)) == 0);
  }

  SUBCASE("C_h(omega ^ alpha) = (-1)^{|a||w|} C_h(alpha) ^ omega*") {
    auto& mdl = model();
    std::uniform_int_distribution<int> d(-2, 2);
    for (int t = 0; t < 6; ++t) {
      // omega: untwisted form, alpha in the bundle complex, both homogeneous
      for (Frame fw : {Frame::One, Frame::Em}) {
        for (Frame fa : {Frame::One, Frame::Ep}) {
          int w0 = Model<Rational>::slice_weight(0, frame_bidegree(fw));
          int wa = Model<Rational>::slice_weight(1, frame_bidegree(fa));
          int tw = std::abs(w0) + (t % 2) * 2, ta = std::abs(wa) + (t % 2) * 2;
          if (tw > mdl.twolmax() || ta > mdl.twolmax()) continue;
          ModelForm<Rational> omega = ModelForm<Rational>::wrap(
              fw, AlgebraElement<Rational>::basis(tw, -tw, w0) * CQ(Rational(d(rng))));
          ModelForm<Rational> alpha = ModelForm<Rational>::wrap(
              fa, AlgebraElement<Rational>::basis(ta, -ta + 2, wa));
          int sign = (frame_degree(fw) * frame_degree(fa)) % 2 == 0 ? 1 : -1;
          ModelForm<Rational> lhs = mdl.star(mdl.mul(omega, alpha)) * CQ(b.h.scale);
          ModelForm<Rational> rhs =
              mdl.mul(mdl.star(alpha) * CQ(b.h.scale), mdl.star(omega)) *
              CQ(Rational(sign));
          CHECK((lhs - rhs).is_zero());
        }
      }
    }
  }
}

TEST_CASE("twisted hodge maps") {
  std::mt19937_64 rng(62);
  for (int k : {-1, 0, 2}) {
    const auto& b = bundle(k);

    // bidegree mapping (a,b) -> (n-a, n-b)
    for (const auto& [key, m] : b.hodge_bar.parts()) {
      const auto& [from, to, l] = key;
      CHECK(to.a == 1 - from.a);
      CHECK(to.b == 1 - from.b);
    }

    // double application signs: *bar_vee o *bar = (-1)^deg
    BlockMap<Rational> round = b.hodge_bar_back.compose(b.hodge_bar);
    for (const auto& [bd, blocks] : b.space->components()) {
      int sign = bd.total() % 2 == 0 ? 1 : -1;
      for (const auto& blk : blocks) {
        Matrix<Rational> part = round.part(bd, bd, blk.label);
        Matrix<Rational> want =
            Matrix<Rational>::identity(blk.dim) * CQ(Rational(sign));
        CHECK((part - want).is_zero());
      }
    }
    BlockMap<Rational> round2 = b.hodge_bar.compose(b.hodge_bar_back);
    for (const auto& [bd, blocks] : b.dual_space->components()) {
      int sign = bd.total() % 2 == 0 ? 1 : -1;
      for (const auto& blk : blocks) {
        Matrix<Rational> part = round2.part(bd, bd, blk.label);
        Matrix<Rational> want =
            Matrix<Rational>::identity(blk.dim) * CQ(Rational(sign));
        CHECK((part - want).is_zero());
      }
    }
  }

  SUBCASE("untwisted *bar of the unit is the dual volume form") {
    const auto& b0 = bundle(0);
    Element<Rational> one =
        Element<Rational>::basis_vector(b0.space, {0, 0}, HalfInt(0), 0);
    Element<Rational> img = b0.hodge_bar.apply(one);
    // lands in the (1,1) component, block 0
    REQUIRE(img.parts.size() == 1);
    CHECK(img.parts.begin()->first.first == Bidegree{1, 1});
    // and integrates to <1,1> = 1
    ModelForm<Rational> f = model().to_form(0, img);
    CHECK(model().integral(model().mul(
              ModelForm<Rational>::scalar(AlgebraElement<Rational>::unit()), f)) ==
          CQ::one());
  }
}

TEST_CASE("hermitian metric") {
  auto& mdl = model();
  std::mt19937_64 rng(63);

  SUBCASE("<1,1> = 1 with the normalized volume") {
    const auto& b0 = bundle(0);
    Element<Rational> one =
        Element<Rational>::basis_vector(b0.space, {0, 0}, HalfInt(0), 0);
    CHECK(b0.inner(one, one) == CQ::one());
  }

  SUBCASE("conjugate symmetry g(a,b) = g(b,a)* on random pairs") {
    for (int k : {-2, 0, 1}) {
      const auto& b = bundle(k);
      for (int t = 0; t < 5; ++t) {
        ModelForm<Rational> a = mdl.to_form(k, random_element(rng, b.space));
        ModelForm<Rational> c = mdl.to_form(k, random_element(rng, b.space));
        AlgebraElement<Rational> gab = hermitian_metric(mdl, b, a, c);
        AlgebraElement<Rational> gba = hermitian_metric(mdl, b, c, a);
        AlgebraElement<Rational> diff = gab;
        diff.accumulate(mdl.algebra().star(gba), -CQ::one());
        diff.prune();
        CHECK(diff.is_zero());
      }
    }
  }

  SUBCASE("Lefschetz and dual Lefschetz are adjoint") {
    for (int k : {-2, 0, 3}) {
      const auto& b = bundle(k);
      CHECK(adjointness_residual(b, b.lef, b.lam) == 0);
    }
  }
}

TEST_CASE("inner products") {
  SUBCASE("positive definite on every component and block") {
    for (int k : {-3, 0, 1, 4}) {
      const auto& b = bundle(k);
      for (const auto& [key, g] : b.gram) CHECK(is_positive_definite(g));
    }
  }

  SUBCASE("distinct Peter-Weyl blocks are orthogonal") {
    auto& mdl = model();
    const auto& b = bundle(1);
    for (const auto& [ab, blocks] : b.space->components()) {
      if (blocks.size() < 2) continue;
      ModelForm<Rational> x = mdl.basis_form(1, ab, blocks[0].label, 0);
      Element<Rational> ye =
          Element<Rational>::basis_vector(b.space, ab, blocks[1].label, 0);
      ModelForm<Rational> sy = mdl.to_form(-1, b.hodge_bar.apply(ye));
      CHECK(mdl.integral(mdl.mul(x, sy)).is_zero());
    }
  }

  SUBCASE("gram of the lowest block of E_1 at q=4/5") {
    const auto& b = bundle(1);
    const Matrix<Rational>& g = b.gram.at({Bidegree{0, 0}, HalfInt(1)});
    CHECK(is_positive_definite(g));
    CHECK(g(0, 0) == CQ(Rational(1, 2)));
    CHECK(g(1, 1) == CQ(Rational(1, 2)));
    CHECK(g(0, 1).is_zero());
  }
}

TEST_CASE("codifferentials") {
  auto& mdl = model();

  SUBCASE("no incoming degree: dagger vanishes on the (0,0) component") {
    const auto& b = bundle(1);
    for (const auto& [key, m] : b.dbar_dag.parts()) {
      const auto& [from, to, l] = key;
      CHECK(from != Bidegree{0, 0});
    }
  }

  SUBCASE("untwisted codifferentials reduce to Hodge conjugation") {
    // dbar^+ = -*bar_vee o dbar o *bar collapses to -*_H o del o *_H modulo
    // the star relation; verify the operator identity directly
    const auto& b0 = bundle(0);
    BlockMap<Rational> direct =
        (b0.hodge.compose(mdl.del_map(0)).compose(b0.hodge)) * (-CQ::one());
    // compare on the Lefschetz-pair inverse: *_H^{-1} = (-1)^deg *_H; the
    // stated reduction uses *_H twice so signs enter through degrees
    BlockMap<Rational> lhs = b0.dbar_dag;
    // build -*_H^{-1} del *_H honestly
    BlockMap<Rational> hinv = b0.pair->hodge_inverse(b0.hodge);
    BlockMap<Rational> reduction =
        (hinv.compose(mdl.del_map(0)).compose(b0.hodge)) * (-CQ::one());
    CHECK(residual(lhs, reduction) == 0);
    (void)direct;
  }

  SUBCASE("adjointness against the gram oracle, all bundles") {
    for (int k : {-2, -1, 0, 1, 2, 3}) {
      const auto& b = bundle(k);
      CHECK(residual(b.dbar_dag, gram_adjoint(b, b.dbar)) == 0);
      CHECK(residual(b.del_dag, gram_adjoint(b, b.del)) == 0);
      CHECK(adjointness_residual(b, b.dbar, b.dbar_dag) == 0);
      CHECK(adjointness_residual(b, b.del, b.del_dag) == 0);
    }
  }
}

TEST_CASE("stokes vanishing") {
  auto& mdl = model();
  std::mt19937_64 rng(64);
  for (int k : {-2, 0, 1, 3}) {
    const auto& b = bundle(k);
    for (int t = 0; t < 5; ++t) {
      ModelForm<Rational> a = mdl.to_form(k, random_element(rng, b.space));
      ModelForm<Rational> c =
          mdl.to_form(-k, random_element(rng, bundle(-k).space));
      CHECK(stokes_residual(mdl, k, a, c) == 0);
    }
  }
}
