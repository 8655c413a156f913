#pragma once

#include <stdexcept>
#include <string>

namespace kawasaki {

// Bad user-supplied parameters are reported with std::invalid_argument.

// An internal consistency check failed: a result that the model guarantees
// did not hold. Callers must abort rather than continue with bad data.
class ContractViolation : public std::runtime_error {
public:
    explicit ContractViolation(const std::string& what) : std::runtime_error(what) {}
};

// A configuration reached by the limit dynamics is outside the enumerated
// valley taxonomy.
class TaxonomyClosureError : public ContractViolation {
public:
    explicit TaxonomyClosureError(const std::string& what) : ContractViolation(what) {}
};

}  // namespace kawasaki
