#pragma once

#include <stdexcept>
#include <string>

namespace flow714 {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent input data: bad file headers, unsupported
// codecs, sample-rate mismatches, manifest/checksum failures.
struct DataError : Error {
    using Error::Error;
};

// Shape or dimension contract violations in tensor/latent operations.
struct DimensionError : Error {
    using Error::Error;
};

// Non-finite values, solver failures, and other numerical breakdowns.
struct NumericalError : Error {
    using Error::Error;
};

}  // namespace flow714
