#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sagin/types.hpp"

namespace sagin {

/// ||A x + b|| <= c^T x + d
struct SocConstraint {
  RMat A;
  RVec b;
  RVec c;
  double d = 0.0;
};

/// a^T x = b
struct AffineEquality {
  RVec a;
  double b = 0.0;
};

/// minimize 1/2 x^T P x + q^T x + c subject to the cones and equalities.
/// Complex unknowns are lifted as [Re; Im].
struct ConvexProblem {
  int dimension = 0;
  RMat P;
  RVec q;
  double c = 0.0;
  std::vector<SocConstraint> soc;
  std::vector<AffineEquality> eq;

  static ConvexProblem zeros(int n) {
    ConvexProblem p;
    p.dimension = n;
    p.P = RMat::Zero(n, n);
    p.q = RVec::Zero(n);
    return p;
  }
  double objective(const RVec& x) const { return 0.5 * x.dot(P * x) + q.dot(x) + c; }
};

enum class SolveStatus { Optimal, Infeasible, MaxIterations };

const char* to_string(SolveStatus status);

struct ConvexSolution {
  RVec x;
  double objective_value = 0.0;
  SolveStatus status = SolveStatus::MaxIterations;
  int iterations = 0;          // Newton steps, both phases
  std::vector<double> trace;   // objective after every centering step
};

struct SolveOptions {
  double tolerance = 1e-7;
  int max_iterations = 200;
  /// Used as the starting point; phase I is skipped when it is strictly feasible.
  std::optional<RVec> initial_point;
};

ConvexSolution solve(const ConvexProblem& problem, const SolveOptions& options = {});
ConvexSolution solve(const ConvexProblem& problem, double tolerance, int max_iterations);

/// Largest violation over all cones (positive means violated) and equalities.
double max_soc_violation(const ConvexProblem& problem, const RVec& x);
double max_equality_violation(const ConvexProblem& problem, const RVec& x);

/// ||F x + f||^2 <= a^T x + a0 as a cone. Both sides are multiplied by `scale`
/// first, which should make the right-hand side of order one.
SocConstraint quadratic_le_affine(const RMat& F, const RVec& f, const RVec& a, double a0, double scale);

/// ||x - center|| <= radius
SocConstraint ball(const RVec& center, double radius);

/// Plain-text dump: header line, objective blocks, then one line per constraint.
std::string dump_problem(const ConvexProblem& problem);

}  // namespace sagin
