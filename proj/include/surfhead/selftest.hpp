// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace surfhead {

struct CriterionResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SelftestReport {
    std::vector<CriterionResult> results;

    bool all_pass() const
    {
        for (const auto& r : results) {
            if (!r.pass) return false;
        }
        return true;
    }
};

/// Runs the full property suite with fixed seeds: polar-factor uniqueness,
/// PSD preservation, the normal rule, similarity parity, the blend
/// geodesics, hinge coverage, rasterizer exactness, the specular model,
/// the energy terms, and the toy fits.
SelftestReport run_selftest(int threads = 1);

/// One line per criterion plus a summary.
void print_report(const SelftestReport& report, std::ostream& os);

} // namespace surfhead
