#pragma once

#include <string>
#include <vector>

namespace papec::report {

enum class Verdict { kPass, kFail, kInconclusive };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    default: return "inconclusive";
  }
}

struct Inequality {
  std::string id;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
  Verdict verdict = Verdict::kPass;
};

inline Inequality make_check(const std::string& id, double lhs, double rhs, double tol) {
  Inequality q;
  q.id = id;
  q.lhs = lhs;
  q.rhs = rhs;
  q.margin = rhs - lhs;
  q.verdict = lhs <= rhs + tol ? Verdict::kPass : Verdict::kFail;
  return q;
}

// For bounds whose reference value is only known as a certified bracket:
// pass if lhs <= sound_rhs, fail only if lhs exceeds the optimistic end.
inline Inequality make_bracketed_check(const std::string& id, double lhs, double sound_rhs,
                                       double optimistic_rhs, double tol) {
  Inequality q;
  q.id = id;
  q.lhs = lhs;
  q.rhs = sound_rhs;
  q.margin = sound_rhs - lhs;
  if (lhs <= sound_rhs + tol)
    q.verdict = Verdict::kPass;
  else if (lhs > optimistic_rhs + tol)
    q.verdict = Verdict::kFail;
  else
    q.verdict = Verdict::kInconclusive;
  return q;
}

}  // namespace papec::report
