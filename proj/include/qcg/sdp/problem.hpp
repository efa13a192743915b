#pragma once

#include "qcg/core.hpp"

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qcg::sdp {

using LinearMap = std::function<ComplexMatrix(const ComplexMatrix&)>;

enum class ScalarDomain { kNonnegative, kFree };

struct Variable {
  enum class Kind { kBlock, kScalar };
  Kind kind = Kind::kBlock;
  std::size_t index = 0;
};

struct Term {
  Variable var;
  LinearMap map;              // block terms
  ComplexMatrix coefficient;  // scalar terms: scalar * coefficient
};

struct Constraint {
  std::string name;
  std::size_t dim = 1;
  ComplexMatrix rhs;
  std::vector<Term> terms;

  // Adds a block term X -> map(X); map must send Hermitian matrices to Hermitian dim x dim matrices.
  Constraint& add(Variable var, LinearMap map) {
    if (var.kind != Variable::Kind::kBlock) throw Error(ErrorKind::kInvalidArgument, name + ": expected a block variable");
    terms.push_back({var, std::move(map), {}});
    return *this;
  }

  // Adds a scalar term s * coefficient.
  Constraint& add(Variable var, ComplexMatrix coefficient) {
    if (var.kind != Variable::Kind::kScalar) throw Error(ErrorKind::kInvalidArgument, name + ": expected a scalar variable");
    qcg::detail::require_square(coefficient, dim, "Constraint::add");
    terms.push_back({var, {}, std::move(coefficient)});
    return *this;
  }

  Constraint& add(Variable var, double coefficient) {
    return add(var, ComplexMatrix(coefficient * identity(dim)));
  }
};

// minimize sum <W_k, X_k> + sum w_s s  subject to  sum_t L_t(X) + sum s * C = rhs,  X_k PSD,  s in its domain.
class SdpProblem {
 public:
  struct Block {
    std::string name;
    std::size_t dim;
    ComplexMatrix objective;
  };

  struct Scalar {
    std::string name;
    ScalarDomain domain;
    double objective = 0.0;
  };

  Variable add_block(std::string name, std::size_t dim) {
    check_name(name);
    blocks_.push_back({std::move(name), dim, ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))});
    return {Variable::Kind::kBlock, blocks_.size() - 1};
  }

  Variable add_scalar(std::string name, ScalarDomain domain = ScalarDomain::kNonnegative) {
    check_name(name);
    scalars_.push_back({std::move(name), domain, 0.0});
    return {Variable::Kind::kScalar, scalars_.size() - 1};
  }

  Constraint& add_constraint(std::string name, ComplexMatrix rhs) {
    qcg::detail::require_square(rhs, "SdpProblem::add_constraint");
    if (!is_hermitian(rhs, 1e-12 * std::max(1.0, rhs.cwiseAbs().maxCoeff()))) {
      throw Error(ErrorKind::kNotHermitian, "constraint '" + name + "' has a non-Hermitian target");
    }
    const auto dim = static_cast<std::size_t>(rhs.rows());
    constraints_.push_back({std::move(name), dim, hermitian_part(rhs), {}});
    return constraints_.back();
  }

  Constraint& add_scalar_constraint(std::string name, double rhs) {
    return add_constraint(std::move(name), ComplexMatrix::Constant(1, 1, rhs));
  }

  void set_objective(Variable var, const ComplexMatrix& weight) {
    if (var.kind != Variable::Kind::kBlock) throw Error(ErrorKind::kInvalidArgument, "objective weight needs a block");
    qcg::detail::require_square(blocks_.at(var.index).objective, blocks_.at(var.index).dim, "set_objective");
    qcg::detail::require_square(weight, blocks_.at(var.index).dim, "set_objective");
    blocks_.at(var.index).objective = hermitian_part(weight);
  }

  void set_objective(Variable var, double weight) {
    if (var.kind != Variable::Kind::kScalar) throw Error(ErrorKind::kInvalidArgument, "objective weight needs a scalar");
    scalars_.at(var.index).objective = weight;
  }

  const std::vector<Block>& blocks() const { return blocks_; }
  const std::vector<Scalar>& scalars() const { return scalars_; }
  const std::deque<Constraint>& constraints() const { return constraints_; }

  void validate() const {
    for (const auto& c : constraints_) {
      for (const auto& t : c.terms) {
        const std::size_t limit = t.var.kind == Variable::Kind::kBlock ? blocks_.size() : scalars_.size();
        if (t.var.index >= limit) {
          throw Error(ErrorKind::kInvalidArgument, "constraint '" + c.name + "' references an undeclared variable");
        }
      }
    }
  }

 private:
  void check_name(const std::string& name) const {
    for (const auto& b : blocks_)
      if (b.name == name) throw Error(ErrorKind::kInvalidArgument, "duplicate variable name '" + name + "'");
    for (const auto& s : scalars_)
      if (s.name == name) throw Error(ErrorKind::kInvalidArgument, "duplicate variable name '" + name + "'");
  }

  std::vector<Block> blocks_;
  std::vector<Scalar> scalars_;
  std::deque<Constraint> constraints_;
};

enum class SdpStatus { kOptimal, kInfeasible, kUnbounded, kMaxIterations, kNumericalFailure };

inline const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::kOptimal: return "Optimal";
    case SdpStatus::kInfeasible: return "Infeasible";
    case SdpStatus::kUnbounded: return "Unbounded";
    case SdpStatus::kMaxIterations: return "MaxIterations";
    case SdpStatus::kNumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

struct SolverOptions {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iter = 200;
  double infeas_tol = 1e-8;
  double rank_tol = 1e-10;
  bool verbose = false;
};

// Farkas-type evidence for infeasibility: row weights y with A^T y <= 0 in the cone order and b . y > 0.
struct Certificate {
  std::string kind;  // "linear", "fixed-block", "ray"
  RealVector y;
  double b_dot_y = 0.0;
  double violation = 0.0;  // norm of the cone-order violation, relative to b . y
  std::string detail;
};

struct IterationSummary {
  int iteration = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double mu = 0.0;
  double step = 0.0;
};

struct PresolveReport {
  std::size_t rows = 0;
  std::size_t independent_rows = 0;
  std::size_t coordinates = 0;
  std::vector<std::string> fixed_variables;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::kNumericalFailure;
  double objective_value = 0.0;
  double dual_objective = 0.0;
  std::map<std::string, ComplexMatrix> blocks;
  std::map<std::string, double> scalars;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
  std::optional<Certificate> certificate;
  PresolveReport presolve;
  std::vector<IterationSummary> history;
  std::string message;

  bool optimal() const { return status == SdpStatus::kOptimal; }

  const ComplexMatrix& block(const std::string& name) const {
    auto it = blocks.find(name);
    if (it == blocks.end()) throw Error(ErrorKind::kInvalidArgument, "no block named '" + name + "' in solution");
    return it->second;
  }

  double scalar(const std::string& name) const {
    auto it = scalars.find(name);
    if (it == scalars.end()) throw Error(ErrorKind::kInvalidArgument, "no scalar named '" + name + "' in solution");
    return it->second;
  }
};

}  // namespace qcg::sdp
