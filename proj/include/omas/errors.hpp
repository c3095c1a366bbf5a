#pragma once

#include <stdexcept>
#include <string>

namespace omas {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (shapes, ids, schema).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A standing assumption on the mode set does not hold (e.g. no stabilizing mode).
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

class CertificateError : public Error {
 public:
  using Error::Error;
};

/// The ultimate bound diverges: the geometric tail ratio is not below one.
class UnboundedCertificate : public CertificateError {
 public:
  using CertificateError::CertificateError;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace omas
