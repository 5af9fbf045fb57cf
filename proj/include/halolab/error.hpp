#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <stdexcept>
#include <string>

namespace halolab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the valid range of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Inconsistent or unsupported configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed message or buffer (length mismatch, double completion).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Bad command-line usage (unknown option, malformed value).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Non-physical state encountered by the solver. Carries the block's Morton
// index and the ghost-inclusive cell coordinates where it was detected.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::uint64_t block_morton, int i, int j, int k)
      : Error(what), block_morton_(block_morton), cell_{i, j, k} {}
  explicit SolverError(const std::string& what) : Error(what) {}

  std::uint64_t block_morton() const { return block_morton_; }
  const int* cell() const { return cell_; }

 private:
  std::uint64_t block_morton_ = 0;
  int cell_[3] = {-1, -1, -1};
};

// Watchdog expired while waiting on communication.
class DeadlockError : public Error {
 public:
  using Error::Error;
};

// Raised in ranks that were blocked when a peer rank failed.
class AbortedError : public Error {
 public:
  using Error::Error;
};

// Aggregated failure of one or more ranks.
class RankFailure : public Error {
 public:
  RankFailure(const std::string& what, int first_rank, std::exception_ptr cause)
      : Error(what), rank_(first_rank), cause_(std::move(cause)) {}
  int rank() const { return rank_; }
  // The original exception thrown by the first failing rank.
  std::exception_ptr cause() const { return cause_; }

 private:
  int rank_;
  std::exception_ptr cause_;
};

// A parallel_for task threw.
class TaskError : public Error {
 public:
  TaskError(const std::string& what, std::size_t index) : Error(what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

}  // namespace halolab
