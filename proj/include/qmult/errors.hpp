#pragma once

#include <stdexcept>
#include <string>

namespace qmult {

enum class Err {
  MismatchedRing,
  NonUnit,
  NotDivisible,
  ThetaNotOrthogonal,
  NotOrthogonal,
  TooLarge,
  NotModuleLinear,
  ShapeMismatch,
  GammaNotInGl0,
  AlphaNotOnLine,
  InvalidParams,
  NoRoot,
  WrongOrder,
  NotSemistable,
  InsufficientData,
  Unsupported,
};

inline const char* err_name(Err e) {
  switch (e) {
    case Err::MismatchedRing: return "MismatchedRing";
    case Err::NonUnit: return "NonUnit";
    case Err::NotDivisible: return "NotDivisible";
    case Err::ThetaNotOrthogonal: return "ThetaNotOrthogonal";
    case Err::NotOrthogonal: return "NotOrthogonal";
    case Err::TooLarge: return "TooLarge";
    case Err::NotModuleLinear: return "NotModuleLinear";
    case Err::ShapeMismatch: return "ShapeMismatch";
    case Err::GammaNotInGl0: return "GammaNotInGl0";
    case Err::AlphaNotOnLine: return "AlphaNotOnLine";
    case Err::InvalidParams: return "InvalidParams";
    case Err::NoRoot: return "NoRoot";
    case Err::WrongOrder: return "WrongOrder";
    case Err::NotSemistable: return "NotSemistable";
    case Err::InsufficientData: return "InsufficientData";
    case Err::Unsupported: return "Unsupported";
  }
  return "Unknown";
}

/// Domain error: maps to CLI exit code 2.
class DomainError : public std::runtime_error {
 public:
  DomainError(Err code, const std::string& what)
      : std::runtime_error(std::string(err_name(code)) + ": " + what), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) { throw DomainError(code, what); }

inline void require(bool cond, Err code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace qmult
