#pragma once

#include <functional>
#include <string>
#include <vector>

#include "yamabe/obstruction.hpp"

namespace yamabe {

enum class IdentityScope { All, Flat, ConformallyFlat, Einstein, N2, N3 };

/// Raw residual plus the magnitude of the largest participating term; the
/// normalized residual raw/(1 + scale) is what tolerances apply to. An entry
/// is vacuous when every term is below 1e-13.
struct IdentityResidual {
  double raw = 0;
  double scale = 0;
  bool vacuous = false;

  double normalized() const { return raw / (1.0 + scale); }
};

struct IdentityCatalogEntry {
  std::string id;
  IdentityScope scope;
  std::string quote;  // the anchoring display, transliterated
  std::function<IdentityResidual(const GeometryPoint&)> eval;
};

const std::vector<IdentityCatalogEntry>& identity_catalog();

bool identity_in_scope(const IdentityCatalogEntry& entry, const Scenario& s);

struct IdentityRunResult {
  std::string identity_id;
  std::string scenario_id;
  std::vector<double> point;
  double raw_residual = 0;
  double normalized_residual = 0;
  std::string status;  // pass, fail, vacuous, skipped
  std::string skip_reason;
};

IdentityRunResult run_identity(const IdentityCatalogEntry& entry, const GeometryPoint& gp,
                               double tol);

struct IdentitySuiteReport {
  std::vector<IdentityRunResult> rows;
  int passed = 0, failed = 0, vacuous = 0, skipped = 0;
  double max_normalized = 0;
};

/// Runs the whole catalog over every point of every scenario.
IdentitySuiteReport run_identity_suite(const std::vector<Scenario>& scenarios, double tol,
                                       int order = 6);

/// Residuals of the NEW3a display with both signs of the |W0|^2 term: the
/// paper's own sign first, the opposite sign reported in earlier literature
/// second. Recorded by the suite without deciding between the sources.
std::pair<double, double> new3a_sign_residuals(const GeometryPoint& gp);

}  // namespace yamabe
