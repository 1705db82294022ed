#pragma once

#include <string>
#include <vector>

namespace bqec::runner {

struct CheckResult {
    std::string name;
    double measured;
    double tolerance;
    bool pass;
};

/// Full invariant suite at small dimensions.  fault can name a subsystem
/// ("hmatrix") whose inputs are deliberately perturbed as a negative control.
std::vector<CheckResult> run_validation(const std::string& fault = "");

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace bqec::runner
