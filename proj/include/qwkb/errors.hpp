// SPDX-License-Identifier: MIT
/**
 * @file errors.hpp
 * @brief Exception taxonomy for the quartic-oscillator WKB/Borel library.
 *
 * Every failure mode that a caller can meaningfully react to gets its own
 * type; all of them derive from qwkb::Error so batch drivers can catch one
 * base class.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace qwkb {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Beta/Gamma evaluated at a non-positive-integer pole.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// A computation detected cancellation beyond its guard-digit budget.
class PrecisionLossError : public Error {
 public:
  using Error::Error;
};

/// An iteration (root find, extrapolation, refinement) failed to converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A coefficient violated a structural sign expectation.
class SignViolationError : public Error {
 public:
  using Error::Error;
};

/// A term list contains a term outside the structure a routine supports.
class UnsupportedTermError : public Error {
 public:
  using Error::Error;
};

/// Coefficient cache file is corrupted or inconsistent with its metadata.
class CacheError : public Error {
 public:
  using Error::Error;
};

/// A truncated series has no interior minimum term (optimal truncation
/// impossible at the requested order).
class NoMinimumError : public Error {
 public:
  using Error::Error;
};

/// Input outside the supported domain (bad index, bad phase, bad window).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace qwkb
