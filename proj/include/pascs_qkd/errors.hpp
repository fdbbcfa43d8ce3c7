#pragma once

#include <stdexcept>
#include <string>

namespace pascs {

// Photon-number cutoff too small for the requested accuracy.
class TruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Covariance data that violates the uncertainty principle beyond tolerance.
class UnphysicalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// No amplitude in the search interval gives a positive key rate.
class NoSecureOperatingPoint : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace pascs
