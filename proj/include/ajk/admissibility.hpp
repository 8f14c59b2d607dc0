#pragma once

#include <string>
#include <vector>

#include "ajk/parameter_set.hpp"

namespace ajk {

enum class CheckStatus { Pass, Fail, Unverified };

struct CheckItem {
    std::string condition;
    CheckStatus status = CheckStatus::Pass;
    std::string detail;
    double time = 0.0;
    int index = -1;  // parameter index when relevant
};

struct AdmissibilityReport {
    std::vector<CheckItem> items;

    bool admissible() const {
        for (const auto& it : items)
            if (it.status == CheckStatus::Fail) return false;
        return true;
    }
    bool fully_verified() const {
        for (const auto& it : items)
            if (it.status != CheckStatus::Pass) return false;
        return true;
    }
    const CheckItem* find(const std::string& condition) const {
        for (const auto& it : items)
            if (it.condition == condition) return &it;
        return nullptr;
    }
    std::string summary() const;
};

// Clause-by-clause admissibility and local-integrability report. Failures
// are report entries, never exceptions.
AdmissibilityReport check_admissible(const AffineParameterSet& p);

// Smallest eigenvalue of a symmetric matrix (cyclic Jacobi).
double min_eigenvalue_sym(rmat a);

}  // namespace ajk
