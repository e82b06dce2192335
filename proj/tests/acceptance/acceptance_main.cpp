// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.

#include "qkahler/chern.hpp"
#include "qkahler/drivers.hpp"

#include "support/oracles.hpp"

#include <chrono>
#include <iostream>
#include <random>

using namespace qk;
using namespace qkt;

namespace {

using CQ = Cx<Rational>;
using Clock = std::chrono::steady_clock;

int failures = 0;

struct Criterion {
  std::string label;
  double budget_seconds = 0;  // 0 = no budget stated
  Clock::time_point start = Clock::now();
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
  ~Criterion() {
    double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (budget_seconds > 0 && secs > budget_seconds) {
      ok = false;
      if (detail.empty()) detail = "runtime budget exceeded";
    }
    std::printf("[%s] %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", label.c_str(),
                secs, detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++failures;
  }
};

Model<Rational>& model() {
  static Model<Rational> m(Rational(4, 5), 6);
  return m;
}

const TwistedBundle<Rational>& bundle(int k) {
  static std::map<int, TwistedBundle<Rational>> cache;
  auto it = cache.find(k);
  if (it == cache.end()) it = cache.emplace(k, make_bundle(model(), k)).first;
  return it->second;
}

Element<Rational> seeded_primitive(std::mt19937_64& rng,
                                   const LefschetzPair<Rational>& pair, int k) {
  auto basis = pair.primitive_basis(k);
  Element<Rational> e = Element<Rational>::zero(pair.space());
  std::uniform_int_distribution<int> d(-3, 3);
  for (const auto& b : basis)
    e.accumulate(b, CQ(Rational(d(rng)), Rational(d(rng))));
  return e;
}

void criterion_1() {
  Criterion c{"criterion 1: sl2 Lefschetz identities (oracle n=1..3 and q-CP1)", 5};
  for (int n : {1, 2, 3}) {
    SymplecticExterior<Rational> ext(n);
    auto [r1, r2, r3] = sl2_residuals(ext.pair());
    c.require(r1 == 0 && r2 == 0 && r3 == 0,
              "exterior oracle n=" + std::to_string(n));
  }
  const auto& b0 = bundle(0);
  auto [m1, m2, m3] = sl2_residuals(*b0.pair, HodgeVariant::Bidegree);
  c.require(m1 == 0 && m2 == 0 && m3 == 0, "q-CP1 untwisted pair");
}

void criterion_2() {
  Criterion c{"criterion 2: Lefschetz decomposition round-trip and primitive dims", 5};
  std::mt19937_64 rng(1002);
  std::uniform_int_distribution<int> d(-3, 3);
  for (int n : {1, 2, 3}) {
    SymplecticExterior<Rational> ext(n);
    auto pair = ext.pair();
    for (int k = 0; k <= 2 * n; ++k) {
      // random homogeneous vector: round trip
      Element<Rational> v = Element<Rational>::zero(ext.space);
      Vec<Rational> coords(ext.basis.at(k).size());
      for (auto& x : coords) x = CQ(Rational(d(rng)), Rational(d(rng)));
      v.parts[{{k, 0}, HalfInt(0)}] = coords;
      auto parts = pair.decompose(v);
      Element<Rational> rec = Element<Rational>::zero(ext.space);
      for (const auto& [j, alpha] : parts)
        rec.accumulate(pair.lef_power(j).apply(alpha), CQ::one());
      c.require((rec - v).is_zero(),
                "round trip n=" + std::to_string(n) + " k=" + std::to_string(k));
    }
    for (int k = 0; k <= n; ++k) {
      std::size_t expect = binom(2 * n, k) - binom(2 * n, k - 2);
      c.require(pair.primitive_basis(k).size() == expect,
                "dim P^k formula n=" + std::to_string(n));
      c.require(brute_force_primitive_dim(ext, k) == expect,
                "brute-force oracle n=" + std::to_string(n));
    }
  }
}

void criterion_3() {
  Criterion c{"criterion 3: Hodge map laws on 200 seeded primitives per configuration", 0};
  std::mt19937_64 rng(1003);
  auto run_config = [&](const LefschetzPair<Rational>& pair, HodgeVariant variant,
                        const std::string& name) {
    int n = pair.n();
    BlockMap<Rational> H = pair.hodge_map(variant);
    BlockMap<Rational> Hinv = pair.hodge_inverse(H);
    BlockMap<Rational> Lam = pair.dual_lefschetz(variant);
    std::uniform_int_distribution<int> dk(0, n);
    for (int t = 0; t < 200; ++t) {
      int k = dk(rng);
      Element<Rational> alpha = seeded_primitive(rng, pair, k);
      std::uniform_int_distribution<int> dj(0, n - k);
      int j = dj(rng);
      Element<Rational> ljalpha = pair.lef_power(j).apply(alpha);
      int deg = k + 2 * j;
      // *_H^2 = (-1)^deg
      Element<Rational> round = H.apply(H.apply(ljalpha));
      Element<Rational> want =
          deg % 2 == 0 ? ljalpha : ljalpha * (-CQ::one());
      c.require((round - want).is_zero(), name + ": *_H^2 sign");
      // *_H(X^k) = X^{2n-k}
      for (const auto& [key, coords] : H.apply(ljalpha).parts) {
        bool nz = false;
        for (const auto& x : coords) nz = nz || !x.is_zero();
        if (nz)
          c.require(key.first.total() == 2 * n - deg, name + ": *_H degree");
      }
      // Lam L^j(alpha) = j(n-j-k+1) L^{j-1}(alpha)
      Element<Rational> lhs = Lam.apply(ljalpha);
      Element<Rational> rhs = Element<Rational>::zero(pair.space());
      if (j > 0)
        rhs = pair.lef_power(j - 1).apply(alpha) *
              CQ(Rational(j * (n - j - k + 1)));
      c.require((lhs - rhs).is_zero(), name + ": dual Lefschetz coefficient");
    }
    (void)Hinv;
  };
  for (int n : {1, 2, 3}) {
    SymplecticExterior<Rational> ext(n);
    run_config(ext.pair(), HodgeVariant::TotalDegree,
               "exterior n=" + std::to_string(n));
  }
  run_config(*bundle(0).pair, HodgeVariant::Bidegree, "q-CP1 untwisted");
}

void criterion_4() {
  Criterion c{"criterion 4: model well-formedness at q=4/5, l<=3, k=-5..5", 30};
  auto& mdl = model();
  for (int twol = 0; twol <= mdl.twolmax(); ++twol)
    c.require(mdl.block_relation_residual(twol) == 0, "U_q(sl2) relations");
  std::mt19937_64 rng(1004);
  std::uniform_int_distribution<int> dcoef(-3, 3);
  for (int k = -5; k <= 5; ++k) {
    auto dbar = mdl.dbar_map(k);
    auto del = mdl.del_map(k);
    c.require(dbar.compose(dbar).is_zero(), "dbar^2 = 0");
    c.require(del.compose(del).is_zero(), "del^2 = 0");
    auto st = mdl.star_map(k);
    c.require(residual(mdl.del_map(-k).compose(st), st.compose(dbar)) == 0,
              "star relation");
    // Stokes on random pairs
    const auto& b = bundle(k);
    for (int t = 0; t < 3; ++t) {
      auto pickform = [&](int kk, SpacePtr sp) {
        ModelForm<Rational> out;
        for (const auto& [ab, blocks] : sp->components()) {
          const auto& blk = blocks[rng() % blocks.size()];
          out.accumulate(
              mdl.basis_form(kk, ab, blk.label, rng() % blk.dim) *
                  CQ(Rational(dcoef(rng)), Rational(dcoef(rng))),
              CQ::one());
        }
        return out;
      };
      ModelForm<Rational> alpha = pickform(k, b.space);
      ModelForm<Rational> beta = pickform(-k, b.dual_space);
      c.require(stokes_residual(mdl, k, alpha, beta) == 0, "Stokes vanishing");
    }
    for (const auto& [key, g] : b.gram)
      c.require(is_positive_definite(g),
                "Gram positivity k=" + std::to_string(k));
  }
}

void criterion_5() {
  Criterion c{"criterion 5: Nakano and Akizuki-Nakano for k=0..3 (exact and approx)", 60};
  for (int k = 0; k <= 3; ++k) {
    const auto& b = bundle(k);
    ChernConnection<Rational> conn = chern_connection(model(), b);
    for (const auto& [name, r] : nakano_residuals(b, conn))
      c.require(r == 0, "exact " + name + " k=" + std::to_string(k));
    c.require(akizuki_nakano_residual(b, conn) == 0,
              "exact Akizuki-Nakano k=" + std::to_string(k));
  }
  Model<BigFloat> ma(BigFloat(4) / 5, 6);
  BigFloat tol("1e-25");
  for (int k = 0; k <= 3; ++k) {
    auto b = make_bundle(ma, k);
    auto conn = chern_connection(ma, b);
    for (const auto& [name, r] : nakano_residuals(b, conn))
      c.require(r <= tol, "approx " + name + " k=" + std::to_string(k));
    c.require(akizuki_nakano_residual(b, conn) <= tol,
              "approx Akizuki-Nakano k=" + std::to_string(k));
  }
}

void criterion_6() {
  Criterion c{"criterion 6: Hodge decomposition and two-path agreement, k=-5..5", 0};
  for (int k = -5; k <= 5; ++k) {
    const auto& b = bundle(k);
    for (const auto& [ab, blocks] : b.space->components()) {
      HodgeDecompositionReport rep;
      try {
        rep = hodge_decomposition(b, ab);
      } catch (const Error& e) {
        c.require(false, e.what());
        continue;
      }
      c.require(rep.dims_add, "dims add k=" + std::to_string(k));
      c.require(rep.orthogonality_residual == "0",
                "orthogonality k=" + std::to_string(k));
      c.require(
          cohomology_dim_quotient(b, ab) == cohomology_dim_harmonic(b, ab),
          "two-path k=" + std::to_string(k) + " " + ab.str());
    }
  }
}

void criterion_7() {
  Criterion c{"criterion 7: Bott-Borel-Weil table h00 = k+1, h01 = 0 for k=0..5", 0};
  for (int k = 0; k <= 5; ++k) {
    const auto& b = bundle(k);
    c.require(cohomology_dim_harmonic(b, {0, 0}) ==
                  static_cast<std::size_t>(k) + 1,
              "h00(E_" + std::to_string(k) + ")");
    c.require(cohomology_dim_harmonic(b, {0, 1}) == 0,
              "h01(E_" + std::to_string(k) + ")");
  }
}

void criterion_8() {
  Criterion c{"criterion 8: Kodaira vanishing h11(E_k)=0 for k=1..5, h11(E_0)=1", 0};
  for (int k = 1; k <= 5; ++k)
    c.require(cohomology_dim_harmonic(bundle(k), {1, 1}) == 0,
              "h11(E_" + std::to_string(k) + ")");
  c.require(cohomology_dim_harmonic(bundle(0), {1, 1}) == 1, "h11(E_0)");
  c.require(classical_dim(0, 1, 1) == 1, "classical control");
}

void criterion_9() {
  Criterion c{"criterion 9: Serre duality ranks k=-4..4 and h01(E_-k) = k-1", 0};
  auto& mdl = model();
  for (int k = -4; k <= 4; ++k)
    for (int a = 0; a <= 1; ++a)
      for (int bb = 0; bb <= 1; ++bb) {
        SerrePairingReport rep;
        try {
          rep = serre_pairing(mdl, bundle(k), {a, bb});
        } catch (const Error& e) {
          c.require(false, e.what());
          continue;
        }
        c.require(rep.nondegenerate && rep.dim_primal == rep.dim_dual,
                  "pairing k=" + std::to_string(k));
      }
  for (int k = 2; k <= 4; ++k) {
    c.require(cohomology_dim_harmonic(bundle(-k), {0, 1}) ==
                  static_cast<std::size_t>(k) - 1,
              "h01(E_-" + std::to_string(k) + ")");
    c.require(classical_h1(-k) == static_cast<std::size_t>(k) - 1,
              "classical Serre oracle");
  }
}

void criterion_10() {
  Criterion c{"criterion 10: positivity certificates and the Fano package", 0};
  auto& mdl = model();
  bool kahler_pos = true;
  for (const auto& [key, g] : bundle(0).gram)
    if (!is_positive_definite(g)) kahler_pos = false;
  for (int k = -5; k <= 5; ++k) {
    const auto& b = bundle(k);
    auto conn = chern_connection(mdl, b);
    auto cert = certify_positive(b, conn, kahler_pos);
    c.require(cert.pass == (k > 0),
              "certificate sign k=" + std::to_string(k));
  }
  c.require(factorisable(mdl, false) && factorisable(mdl, true), "factorisable");
  c.require(check_invertible(mdl, -2).invertible, "canonical bundle invertible");
  c.require(cohomology_dim_harmonic(bundle(0), {0, 1}) == 0,
            "h01 of the trivial bundle");
}

void criterion_11() {
  Criterion c{"criterion 11: byte-identical cohomology reports", 0};
  RunConfig cfg;
  cfg.lmax = "2";
  cfg.bundle_lo = -2;
  cfg.bundle_hi = 2;
  Report r1 = run_cohomology(cfg);
  Report r2 = run_cohomology(cfg);
  c.require(r1.to_json_string() == r2.to_json_string(), "reports differ");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  if (failures == 0)
    std::printf("all acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
