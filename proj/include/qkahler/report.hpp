#pragma once

#include "qkahler/graded.hpp"

#include <json.hpp>

#include <fstream>
#include <iostream>

namespace qk {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchemaVersion = "1";
inline constexpr const char* kToolkitVersion = "0.1.0";

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string max_residual = "0";
  std::string detail;
};

struct CertificateEntry {
  std::string kind;  // "positivity", "kodaira", "invertible", "fano", "diagonalizable"
  Json payload;
};

struct Report {
  Json config;
  std::vector<CheckResult> checks;
  Json cohomology = Json::array();
  std::vector<CertificateEntry> certificates;
  Json notes = Json::object();

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  const CheckResult* first_failure() const {
    for (const auto& c : checks)
      if (!c.pass) return &c;
    return nullptr;
  }

  Json to_json() const {
    Json j;
    j["version"] = kReportSchemaVersion;
    j["toolkit"] = kToolkitVersion;
    j["config"] = config;
    Json cs = Json::array();
    for (const auto& c : checks) {
      Json e;
      e["name"] = c.name;
      e["status"] = c.pass ? "pass" : "fail";
      e["max_residual"] = c.max_residual;
      if (!c.detail.empty()) e["detail"] = c.detail;
      cs.push_back(e);
    }
    j["checks"] = cs;
    j["cohomology"] = cohomology;
    Json certs = Json::array();
    for (const auto& c : certificates) {
      Json e;
      e["kind"] = c.kind;
      e["data"] = c.payload;
      certs.push_back(e);
    }
    j["certificates"] = certs;
    j["notes"] = notes;
    return j;
  }

  std::string to_json_string() const { return to_json().dump(2) + "\n"; }

  void render_text(std::ostream& os) const {
    os << "qkahler report (schema " << kReportSchemaVersion << ")\n";
    for (const auto& c : checks)
      os << "  [" << (c.pass ? "pass" : "FAIL") << "] " << c.name
         << "  residual=" << c.max_residual
         << (c.detail.empty() ? "" : "  " + c.detail) << "\n";
    if (!cohomology.empty()) {
      os << "  bundle  h00 h10 h01 h11  (cutoff)\n";
      for (const auto& row : cohomology)
        os << "  " << std::setw(5) << row["bundle"].get<int>() << "  "
           << std::setw(4) << row["h00"].get<std::size_t>() << std::setw(4)
           << row["h10"].get<std::size_t>() << std::setw(4)
           << row["h01"].get<std::size_t>() << std::setw(4)
           << row["h11"].get<std::size_t>() << "   l<=" +
                  row["cutoff"].get<std::string>()
           << "\n";
    }
    for (const auto& c : certificates)
      os << "  certificate[" << c.kind << "]: " << c.payload.dump() << "\n";
  }
};

// ---- versioned serialization of spaces and block operators ----

inline Json space_to_json(const BigradedSpace& s) {
  Json j;
  j["format"] = "qkahler-space/1";
  Json comps = Json::array();
  for (const auto& [bd, blocks] : s.components()) {
    Json c;
    c["a"] = bd.a;
    c["b"] = bd.b;
    Json bl = Json::array();
    for (const auto& b : blocks) {
      Json e;
      e["label"] = b.label.str();
      e["dim"] = b.dim;
      bl.push_back(e);
    }
    c["blocks"] = bl;
    comps.push_back(c);
  }
  j["components"] = comps;
  return j;
}

template <class F>
Json matrix_to_json(const Matrix<F>& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c).str());
    rows.push_back(row);
  }
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["entries"] = rows;
  return j;
}

template <class F>
Json blockmap_to_json(const BlockMap<F>& op) {
  Json j;
  j["format"] = "qkahler-operator/1";
  j["antilinear"] = op.antilinear();
  j["source"] = space_to_json(*op.source());
  j["target"] = space_to_json(*op.target());
  Json parts = Json::array();
  for (const auto& [key, m] : op.parts()) {
    const auto& [from, to, l] = key;
    Json e;
    e["from_a"] = from.a;
    e["from_b"] = from.b;
    e["to_a"] = to.a;
    e["to_b"] = to.b;
    e["label"] = l.str();
    e["matrix"] = matrix_to_json(m);
    parts.push_back(e);
  }
  j["parts"] = parts;
  return j;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::ConfigError, "cannot open output file " + path);
  os << content;
}

}  // namespace qk
