#pragma once

#include <string>

#include "yamabe/functional.hpp"
#include "yamabe/identities.hpp"
#include "yamabe/obstruction.hpp"

namespace yamabe {

/// Decimal with 17 significant digits: doubles round-trip losslessly and the
/// emitted text is deterministic.
std::string format_real(double v);

/// Deterministic JSON documents (fixed key order, fixed element order).
std::string stacks_json(const GeometryPoint& gp);
std::string expansion_json(const GeometryPoint& gp);
std::string obstruction_json(const std::vector<ObstructionReport>& reports,
                             const std::vector<ConformalCheck>& conformal,
                             const std::vector<std::string>& conformal_labels);
std::string identity_suite_json(const IdentitySuiteReport& rep);
std::string functional_json(const FunctionalReport& rep);

/// Plain-text tables for the terminal.
std::string obstruction_table(const std::vector<ObstructionReport>& reports);
std::string identity_suite_table(const IdentitySuiteReport& rep);

}  // namespace yamabe
