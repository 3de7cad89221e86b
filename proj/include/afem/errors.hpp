#pragma once

#include <stdexcept>
#include <string>

namespace afem {

/// Base class for all library errors. `kind()` is stable and used by the
/// CLI to map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  enum class Kind {
    usage,         // bad input / bad arguments          -> exit 1
    verification,  // a checked invariant failed         -> exit 2
    budget,        // resource or convergence budget hit -> exit 3
    io,            // file system problem                -> exit 3
  };

  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error(Kind::usage, "ParseError: " + w) {}
};
struct NonConforming : Error {
  explicit NonConforming(const std::string& w) : Error(Kind::verification, "NonConforming: " + w) {}
};
struct MatchingViolation : Error {
  explicit MatchingViolation(const std::string& w)
      : Error(Kind::verification, "MatchingViolation: " + w) {}
};
struct AlreadyBisected : Error {
  explicit AlreadyBisected(const std::string& w)
      : Error(Kind::usage, "AlreadyBisected: " + w) {}
};
struct DegenerateElement : Error {
  explicit DegenerateElement(const std::string& w)
      : Error(Kind::verification, "DegenerateElement: " + w) {}
};
struct NotAPopulation : Error {
  explicit NotAPopulation(const std::string& w)
      : Error(Kind::verification, "NotAPopulation: " + w) {}
};
struct NotAMidpoint : Error {
  explicit NotAMidpoint(const std::string& w)
      : Error(Kind::usage, "NotAMidpoint: " + w) {}
};
struct NotNested : Error {
  explicit NotNested(const std::string& w) : Error(Kind::usage, "NotNested: " + w) {}
};
struct ChainNotFound : Error {
  explicit ChainNotFound(const std::string& w)
      : Error(Kind::verification, "ChainNotFound: " + w) {}
};
struct GuaranteeViolated : Error {
  explicit GuaranteeViolated(const std::string& w)
      : Error(Kind::verification, "GuaranteeViolated: " + w) {}
};
struct NoConvergence : Error {
  explicit NoConvergence(const std::string& w)
      : Error(Kind::budget, "NoConvergence: " + w) {}
};
struct BudgetExceeded : Error {
  explicit BudgetExceeded(const std::string& w)
      : Error(Kind::budget, "BudgetExceeded: " + w) {}
};
struct CannotPlace : Error {
  explicit CannotPlace(const std::string& w) : Error(Kind::usage, "CannotPlace: " + w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(Kind::io, "IoError: " + w) {}
};

}  // namespace afem
