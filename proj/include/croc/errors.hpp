#pragma once

#include <stdexcept>
#include <string>

namespace croc {

// Base class for all toolkit errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input file (bad header, wrong field count, unreadable line).
struct parse_error : error {
    using error::error;
};

// Structurally valid input that violates a data contract (bad genotype code,
// duplicate variant id, single-class cohort, ...).
struct data_error : error {
    using error::error;
};

// An operation was called with arguments that violate its preconditions.
struct usage_error : error {
    using error::error;
};

// A model references a locus or member variant that the cohort does not carry.
// CLI maps this to exit code 3; it is a usage error at the API level.
struct locus_mismatch_error : usage_error {
    using usage_error::usage_error;
};

// Cohort simulation could not fill the case/control quotas.
struct simulation_error : error {
    using error::error;
};

} // namespace croc
