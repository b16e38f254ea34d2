#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spe {

enum class Relation { LessEqual, Equal, GreaterEqual };

template <typename Scalar>
struct Variable {
  std::string name;
  std::optional<Scalar> lower;
  std::optional<Scalar> upper;
};

/// One row `sum(coefficient * x[index]) relation rhs`, stored sparsely.
template <typename Scalar>
struct Constraint {
  std::vector<std::pair<int, Scalar>> terms;
  Relation relation = Relation::LessEqual;
  Scalar rhs = Scalar(0);
};

/// A set of bounded variables, linear constraints, and an optional linear
/// objective to minimize. Scalar may be double or an exact rational type.
template <typename Scalar>
class LinearSystem {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  int add_variable(std::string name, std::optional<Scalar> lower,
                   std::optional<Scalar> upper) {
    variables_.push_back({std::move(name), std::move(lower), std::move(upper)});
    return static_cast<int>(variables_.size()) - 1;
  }

  void add_constraint(std::vector<std::pair<int, Scalar>> terms, Relation relation,
                      Scalar rhs) {
    for (const auto& [index, coefficient] : terms) {
      if (index < 0 || index >= variable_count()) {
        throw std::out_of_range("constraint references unknown variable");
      }
    }
    constraints_.push_back({std::move(terms), relation, std::move(rhs)});
  }

  /// Dense-row convenience; the row width must equal the variable count.
  void add_row(const Vector& row, Relation relation, Scalar rhs) {
    if (row.size() != variable_count()) {
      throw std::invalid_argument("constraint row width does not match variable count");
    }
    std::vector<std::pair<int, Scalar>> terms;
    for (Eigen::Index j = 0; j < row.size(); ++j) {
      if (row(j) != Scalar(0)) terms.emplace_back(static_cast<int>(j), row(j));
    }
    constraints_.push_back({std::move(terms), relation, std::move(rhs)});
  }

  void set_objective(Vector costs) {
    if (costs.size() != variable_count()) {
      throw std::invalid_argument("objective width does not match variable count");
    }
    objective_ = std::move(costs);
  }

  Variable<Scalar>& variable(int index) { return variables_.at(index); }
  const Variable<Scalar>& variable(int index) const { return variables_.at(index); }
  const std::vector<Variable<Scalar>>& variables() const { return variables_; }
  const std::vector<Constraint<Scalar>>& constraints() const { return constraints_; }
  const std::optional<Vector>& objective() const { return objective_; }
  int variable_count() const { return static_cast<int>(variables_.size()); }
  int constraint_count() const { return static_cast<int>(constraints_.size()); }

 private:
  std::vector<Variable<Scalar>> variables_;
  std::vector<Constraint<Scalar>> constraints_;
  std::optional<Vector> objective_;
};

/// Largest violation of any bound or constraint at `x` (zero when feasible).
template <typename Scalar>
Scalar max_violation(const LinearSystem<Scalar>& system,
                     const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) {
  if (x.size() != system.variable_count()) {
    throw std::invalid_argument("assignment width does not match variable count");
  }
  Scalar worst(0);
  auto note = [&worst](const Scalar& v) {
    if (v > worst) worst = v;
  };
  for (int j = 0; j < system.variable_count(); ++j) {
    const auto& var = system.variable(j);
    if (var.lower) note(*var.lower - x(j));
    if (var.upper) note(x(j) - *var.upper);
  }
  for (const auto& row : system.constraints()) {
    Scalar lhs(0);
    for (const auto& [index, coefficient] : row.terms) lhs += coefficient * x(index);
    switch (row.relation) {
      case Relation::LessEqual: note(lhs - row.rhs); break;
      case Relation::GreaterEqual: note(row.rhs - lhs); break;
      case Relation::Equal: {
        const Scalar gap = lhs - row.rhs;
        note(gap < Scalar(0) ? Scalar(-gap) : gap);
        break;
      }
    }
  }
  return worst;
}

}  // namespace spe
