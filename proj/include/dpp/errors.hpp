#ifndef DPP_ERRORS_HPP
#define DPP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dpp {

// Base class for all library errors.
struct DppError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input matrix does not have full numerical column rank.
struct RankDeficientError : DppError {
  using DppError::DppError;
};

// Input matrix fails the symmetry check.
struct NotSymmetricError : DppError {
  using DppError::DppError;
};

// Gram-Schmidt residual is numerically zero: the appended row is
// (nearly) dependent on the rows selected so far.
struct DegenerateResidualError : DppError {
  using DppError::DppError;
};

// Alias table weights are negative, non-finite, or all zero.
struct InvalidWeightsError : DppError {
  using DppError::DppError;
};

// The running total of the conditional distribution drifted away from
// its theoretical value during sequential sampling.
struct NumericalUnderflowError : DppError {
  using DppError::DppError;
};

// A supposedly positive semi-definite matrix has a negative eigenvalue.
struct NotPsdError : DppError {
  using DppError::DppError;
};

// Fewer positive eigenvalues than the requested fixed sample size.
struct InfeasibleError : DppError {
  using DppError::DppError;
};

// An elementary-polynomial denominator underflowed to zero.
struct NumericalInstabilityError : DppError {
  using DppError::DppError;
};

// Brute-force enumeration guard exceeded.
struct TooLargeError : DppError {
  using DppError::DppError;
};

// Category merging cannot reach the minimum expected count.
struct InsufficientSamplesError : DppError {
  using DppError::DppError;
};

// Stratified spec requires the segment count to divide the ground set size.
struct NotDivisibleError : DppError {
  using DppError::DppError;
};

// Hard cap on rejection proposals hit; indicates a livelock caused by a
// numerically broken instance.
struct ProposalCapError : DppError {
  using DppError::DppError;
};

}  // namespace dpp

#endif  // DPP_ERRORS_HPP
