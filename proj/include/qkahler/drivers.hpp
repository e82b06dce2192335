#pragma once

#include "qkahler/config.hpp"

namespace qk {

// Run the full identity-verification suite (sl2, triples, metric, Stokes,
// Nakano, Akizuki-Nakano, Hodge decomposition, intertwine, certificates).
Report run_verify(const RunConfig& cfg);

// Cohomology dimension table for every bundle in range, with the two-path
// agreement checks.
Report run_cohomology(const RunConfig& cfg);

// Serre pairing ranks and the dual-dimension identity.
Report run_serre(const RunConfig& cfg);

}  // namespace qk
