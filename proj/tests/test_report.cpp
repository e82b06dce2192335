#include "qkahler/drivers.hpp"

#include <doctest.h>

using namespace qk;

namespace {
RunConfig small_config() {
  RunConfig cfg;
  cfg.q = "4/5";
  cfg.lmax = "1";
  cfg.bundle_lo = -1;
  cfg.bundle_hi = 1;
  return cfg;
}
}  // namespace

TEST_CASE("config validation") {
  RunConfig cfg = small_config();
  CHECK_NOTHROW(cfg.validate());

  SUBCASE("q = 1 is rejected") {
    cfg.q = "1";
    CHECK_THROWS_AS(cfg.validate(), Error);
  }
  SUBCASE("q = 0 is rejected") {
    cfg.q = "0";
    CHECK_THROWS_AS(cfg.validate(), Error);
  }
  SUBCASE("tolerance needs approx mode") {
    cfg.tol = "1e-20";
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.mode = Mode::Approx;
    CHECK_NOTHROW(cfg.validate());
  }
  SUBCASE("unitary normalization needs approx mode") {
    cfg.normalization = Normalization::Unitary;
    CHECK_THROWS_AS(cfg.validate(), Error);
  }
  SUBCASE("empty bundle range is rejected") {
    cfg.bundle_lo = 2;
    cfg.bundle_hi = 1;
    CHECK_THROWS_AS(cfg.validate(), Error);
  }
  SUBCASE("half-integer cutoffs parse") {
    cfg.lmax = "5/2";
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.twolmax() == 5);
  }
}

TEST_CASE("verify report structure and exact-mode determinism") {
  RunConfig cfg = small_config();
  Report r1 = run_verify(cfg);
  CHECK(r1.all_pass());
  Report r2 = run_verify(cfg);
  CHECK(r1.to_json_string() == r2.to_json_string());

  Json j = r1.to_json();
  CHECK(j["version"] == "1");
  CHECK(j.contains("config"));
  CHECK(j.contains("checks"));
  CHECK(j.contains("cohomology"));
  CHECK(j.contains("certificates"));
  for (const auto& c : j["checks"]) {
    CHECK(c.contains("name"));
    CHECK(c.contains("status"));
    CHECK(c.contains("max_residual"));
  }
}

TEST_CASE("fault injection produces a named failure") {
  RunConfig cfg = small_config();
  cfg.inject_fault = true;
  Report r = run_verify(cfg);
  CHECK_FALSE(r.all_pass());
  REQUIRE(r.first_failure() != nullptr);
  CHECK(!r.first_failure()->name.empty());
}

TEST_CASE("cohomology report rows") {
  RunConfig cfg = small_config();
  cfg.lmax = "3";
  cfg.bundle_lo = 0;
  cfg.bundle_hi = 3;
  Report r = run_cohomology(cfg);
  CHECK(r.all_pass());
  REQUIRE(r.cohomology.size() == 4);
  for (int k = 0; k <= 3; ++k) {
    const Json& row = r.cohomology[k];
    CHECK(row["bundle"] == k);
    CHECK(row["h00"] == static_cast<std::size_t>(k) + 1);
    CHECK(row["h01"] == 0);
    CHECK(row["cutoff"] == "3");
  }
}

TEST_CASE("serre report") {
  RunConfig cfg = small_config();
  cfg.lmax = "2";
  cfg.bundle_lo = -2;
  cfg.bundle_hi = 2;
  Report r = run_serre(cfg);
  CHECK(r.all_pass());
  bool found = false;
  for (const auto& c : r.certificates)
    if (c.kind == "serre") found = true;
  CHECK(found);
}

TEST_CASE("approx mode with explicit tolerance") {
  RunConfig cfg = small_config();
  cfg.mode = Mode::Approx;
  cfg.tol = "1e-25";
  Report r = run_verify(cfg);
  CHECK(r.all_pass());
}
