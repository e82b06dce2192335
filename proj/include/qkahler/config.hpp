#pragma once

#include "qkahler/report.hpp"
#include "qkahler/su2.hpp"

namespace qk {

struct RunConfig {
  std::string q = "4/5";
  std::string lmax = "3";       // half-integer cutoff
  int bundle_lo = -5;
  int bundle_hi = 5;
  Mode mode = Mode::Exact;
  std::string tol;              // only meaningful in approx mode
  Normalization normalization = Normalization::Triangular;
  std::uint64_t seed = 1;
  std::string out;              // empty = stdout only
  bool inject_fault = false;    // negative-control hook
  bool text = false;            // also render a text table

  void validate() const {
    Rational qr = parse_rational(q);
    if (qr <= 0 || qr == 1)
      throw Error(ErrorKind::InvalidQ, "q must be a positive rational != 1");
    HalfInt l = HalfInt::parse(lmax);
    if (l.twice() < 0) throw Error(ErrorKind::ConfigError, "lmax must be >= 0");
    if (bundle_lo > bundle_hi)
      throw Error(ErrorKind::ConfigError, "empty bundle range");
    if (mode == Mode::Exact && !tol.empty())
      throw Error(ErrorKind::ConfigError,
                  "tolerance is only meaningful in approx mode");
    if (mode == Mode::Exact && normalization == Normalization::Unitary)
      throw Error(ErrorKind::ConfigError,
                  "unitary normalization requires approx mode");
  }

  int twolmax() const { return HalfInt::parse(lmax).twice(); }

  Json to_json() const {
    Json j;
    j["q"] = q;
    j["lmax"] = lmax;
    j["bundles"] = std::to_string(bundle_lo) + ".." + std::to_string(bundle_hi);
    j["mode"] = mode == Mode::Exact ? "exact" : "approx";
    j["tol"] = mode == Mode::Exact ? "0" : (tol.empty() ? "1e-25" : tol);
    j["normalization"] =
        normalization == Normalization::Triangular ? "triangular" : "unitary";
    j["seed"] = seed;
    return j;
  }
};

}  // namespace qk
