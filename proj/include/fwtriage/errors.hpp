#pragma once

#include <stdexcept>
#include <string>

namespace fwtriage {

// Argument errors are reported as std::invalid_argument; everything below is
// a domain failure that callers may want to tell apart.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ingestion_error : public error {
 public:
  using error::error;
};

class insufficient_data_error : public error {
 public:
  using error::error;
};

class truncated_header_error : public error {
 public:
  using error::error;
};

class malformed_header_error : public error {
 public:
  using error::error;
};

/// A ledger record violates its own invariants.
class record_validation_error : public error {
 public:
  using error::error;
};

class persistence_error : public error {
 public:
  using error::error;
};

class conflict_error : public error {
 public:
  using error::error;
};

}  // namespace fwtriage
