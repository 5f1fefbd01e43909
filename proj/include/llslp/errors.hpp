#pragma once

#include <stdexcept>
#include <string>

namespace llslp {

// Base for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class RankDeficient : public Error {
 public:
  explicit RankDeficient(const std::string& msg) : Error(msg) {}
};

class DegenerateBasis : public Error {
 public:
  explicit DegenerateBasis(const std::string& msg) : Error(msg) {}
};

class IndependentColumn : public Error {
 public:
  explicit IndependentColumn(const std::string& msg) : Error(msg) {}
};

class SeparatedPair : public Error {
 public:
  explicit SeparatedPair(const std::string& msg) : Error(msg) {}
};

class TooLarge : public Error {
 public:
  explicit TooLarge(const std::string& msg) : Error(msg) {}
};

class EmptyGraph : public Error {
 public:
  explicit EmptyGraph(const std::string& msg) : Error(msg) {}
};

class NegativeCycle : public Error {
 public:
  explicit NegativeCycle(const std::string& msg) : Error(msg) {}
};

class NotInProjection : public Error {
 public:
  explicit NotInProjection(const std::string& msg) : Error(msg) {}
};

class OrderingAmbiguous : public Error {
 public:
  explicit OrderingAmbiguous(const std::string& msg) : Error(msg) {}
};

class SingularSystem : public Error {
 public:
  explicit SingularSystem(const std::string& msg) : Error(msg) {}
};

class InvalidPartition : public Error {
 public:
  explicit InvalidPartition(const std::string& msg) : Error(msg) {}
};

class Degenerate : public Error {
 public:
  explicit Degenerate(const std::string& msg) : Error(msg) {}
};

class NumericalBreakdown : public Error {
 public:
  explicit NumericalBreakdown(const std::string& msg) : Error(msg) {}
};

class RoundingFailed : public Error {
 public:
  explicit RoundingFailed(const std::string& msg) : Error(msg) {}
};

class NeighborhoodViolation : public Error {
 public:
  explicit NeighborhoodViolation(const std::string& msg) : Error(msg) {}
};

class IterationLimit : public Error {
 public:
  explicit IterationLimit(const std::string& msg) : Error(msg) {}
};

class SearchLimit : public Error {
 public:
  explicit SearchLimit(const std::string& msg) : Error(msg) {}
};

class NonMonotoneMu : public Error {
 public:
  explicit NonMonotoneMu(const std::string& msg) : Error(msg) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

}  // namespace llslp
