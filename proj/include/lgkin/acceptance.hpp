// The acceptance suite: one function per criterion group, each returning
// pass/fail records with the measured value and the pinned threshold.
#pragma once

#include "lgkin/config.hpp"

namespace lgkin {

/// Group names in execution order.
const std::vector<std::string>& acceptance_groups();

/// Run one group; appends measured constants to `constants` when non-null.
std::vector<CheckResult> run_acceptance_group(const std::string& group,
                                              std::map<std::string, double>* constants);

/// Run `groups` (all when empty), print one line per criterion to stdout,
/// fill a manifest. Returns true iff everything passed.
bool run_acceptance(const std::vector<std::string>& groups, RunManifest& manifest);

}  // namespace lgkin
