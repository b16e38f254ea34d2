#pragma once

#include "spe/linear_system.hpp"

#include <Eigen/Core>

#include <limits>
#include <vector>

namespace spe {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

template <typename Scalar>
struct SimplexTolerances {
  Scalar feasibility;  // phase-1 objective above this means infeasible
  Scalar pivot;        // smallest admissible pivot element and reduced cost
};

template <typename Scalar>
SimplexTolerances<Scalar> default_tolerances() {
  if constexpr (std::numeric_limits<Scalar>::is_exact) {
    return {Scalar(0), Scalar(0)};
  } else {
    return {Scalar(1e-7), Scalar(1e-10)};
  }
}

template <typename Scalar>
struct LpResult {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  LpStatus status = LpStatus::Infeasible;
  /// A feasible point when status is Optimal or Unbounded; empty otherwise.
  Vector values;
  Scalar objective = Scalar(0);
  int pivots = 0;

  bool feasible() const {
    return status == LpStatus::Optimal || status == LpStatus::Unbounded;
  }
};

namespace detail {

// Built in two steps: constructing from a nullary expression trips a
// conversion trait of boost::multiprecision types.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> zeros(Eigen::Index n) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(n);
  v.setZero();
  return v;
}

template <typename Scalar>
struct ColumnMap {
  enum class Kind { Fixed, Lower, Upper, Free } kind = Kind::Free;
  Scalar offset = Scalar(0);
  int first = -1;
  int second = -1;
};

template <typename Scalar>
class Tableau {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Tableau(int rows, int columns) : basis(rows, -1) { t.setZero(rows + 1, columns + 1); }

  int rows() const { return static_cast<int>(t.rows()) - 1; }
  int columns() const { return static_cast<int>(t.cols()) - 1; }
  Scalar& rhs(int row) { return t(row, columns()); }
  Scalar& cost(int column) { return t(rows(), column); }

  void pivot(int row, int column) {
    const Scalar p = t(row, column);
    t.row(row) /= p;
    for (int i = 0; i <= rows(); ++i) {
      if (i == row) continue;
      const Scalar f = t(i, column);
      if (f != Scalar(0)) {
        t.row(i) -= f * t.row(row);
        t(i, column) = Scalar(0);
      }
    }
    basis[row] = column;
  }

  /// Bland's rule on the columns [0, allowed). Returns Optimal, Unbounded or
  /// IterationLimit.
  LpStatus run(int allowed, const SimplexTolerances<Scalar>& tol, int& pivots, int limit) {
    const int m = rows();
    const int last = columns();
    while (true) {
      int entering = -1;
      for (int j = 0; j < allowed; ++j) {
        if (t(m, j) < -tol.pivot) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return LpStatus::Optimal;

      int leaving = -1;
      Scalar best_ratio(0);
      for (int i = 0; i < m; ++i) {
        const Scalar a = t(i, entering);
        if (!(a > tol.pivot)) continue;
        const Scalar ratio = t(i, last) / a;
        if (leaving < 0 || ratio < best_ratio - tol.pivot) {
          leaving = i;
          best_ratio = ratio;
        } else if (!(ratio > best_ratio + tol.pivot) && basis[i] < basis[leaving]) {
          leaving = i;
          best_ratio = ratio;
        }
      }
      if (leaving < 0) return LpStatus::Unbounded;
      if (pivots >= limit) return LpStatus::IterationLimit;
      pivot(leaving, entering);
      ++pivots;
    }
  }

  Matrix t;
  std::vector<int> basis;
};

}  // namespace detail

/// Two-phase dense-tableau simplex with Bland's rule.
///
/// Without an objective, any feasible point is returned. Variable bounds are
/// handled by shifting (finite lower or upper bound), splitting (free), or
/// substitution (fixed); finite upper bounds on shifted variables become rows.
/// Rows are scaled to unit max-coefficient for inexact scalars.
template <typename Scalar>
LpResult<Scalar> solve_feasibility(const LinearSystem<Scalar>& system,
                                   const SimplexTolerances<Scalar>& tol =
                                       default_tolerances<Scalar>()) {
  using Map = detail::ColumnMap<Scalar>;
  using Kind = typename Map::Kind;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  const int n = system.variable_count();
  std::vector<Map> maps(n);
  int structural = 0;
  for (int j = 0; j < n; ++j) {
    const auto& var = system.variable(j);
    Map& map = maps[j];
    if (var.lower && var.upper && *var.lower > *var.upper) {
      LpResult<Scalar> result;
      result.status = LpStatus::Infeasible;
      return result;
    }
    if (var.lower && var.upper && *var.lower == *var.upper) {
      map.kind = Kind::Fixed;
      map.offset = *var.lower;
    } else if (var.lower) {
      map.kind = Kind::Lower;
      map.offset = *var.lower;
      map.first = structural++;
    } else if (var.upper) {
      map.kind = Kind::Upper;
      map.offset = *var.upper;
      map.first = structural++;
    } else {
      map.kind = Kind::Free;
      map.first = structural++;
      map.second = structural++;
    }
  }

  struct Row {
    Vector coefficients;
    Relation relation;
    Scalar rhs;
  };
  std::vector<Row> rows;
  rows.reserve(system.constraint_count() + n);
  for (const auto& constraint : system.constraints()) {
    Row row{detail::zeros<Scalar>(structural), constraint.relation, constraint.rhs};
    for (const auto& [j, a] : constraint.terms) {
      const Map& map = maps[j];
      switch (map.kind) {
        case Kind::Fixed: row.rhs -= a * map.offset; break;
        case Kind::Lower:
          row.coefficients(map.first) += a;
          row.rhs -= a * map.offset;
          break;
        case Kind::Upper:
          row.coefficients(map.first) -= a;
          row.rhs -= a * map.offset;
          break;
        case Kind::Free:
          row.coefficients(map.first) += a;
          row.coefficients(map.second) -= a;
          break;
      }
    }
    rows.push_back(std::move(row));
  }
  for (int j = 0; j < n; ++j) {
    const auto& var = system.variable(j);
    if (maps[j].kind == Kind::Lower && var.upper) {
      Row row{detail::zeros<Scalar>(structural), Relation::LessEqual, *var.upper - *var.lower};
      row.coefficients(maps[j].first) = Scalar(1);
      rows.push_back(std::move(row));
    }
  }

  int slacks = 0;
  int artificials = 0;
  for (auto& row : rows) {
    if constexpr (!std::numeric_limits<Scalar>::is_exact) {
      Scalar scale(0);
      for (Eigen::Index k = 0; k < row.coefficients.size(); ++k) {
        const Scalar a = row.coefficients(k) < Scalar(0) ? Scalar(-row.coefficients(k))
                                                         : row.coefficients(k);
        if (a > scale) scale = a;
      }
      if (scale > Scalar(0)) {
        row.coefficients /= scale;
        row.rhs /= scale;
      }
    }
    if (row.rhs < Scalar(0)) {
      row.coefficients = -row.coefficients;
      row.rhs = -row.rhs;
      if (row.relation == Relation::LessEqual) {
        row.relation = Relation::GreaterEqual;
      } else if (row.relation == Relation::GreaterEqual) {
        row.relation = Relation::LessEqual;
      }
    }
    if (row.relation != Relation::Equal) ++slacks;
    if (row.relation != Relation::LessEqual) ++artificials;
  }

  const int m = static_cast<int>(rows.size());
  const int first_slack = structural;
  const int first_artificial = structural + slacks;
  detail::Tableau<Scalar> tableau(m, structural + slacks + artificials);
  {
    int slack = first_slack;
    int artificial = first_artificial;
    for (int i = 0; i < m; ++i) {
      const Row& row = rows[i];
      tableau.t.row(i).head(structural) = row.coefficients.transpose();
      tableau.rhs(i) = row.rhs;
      if (row.relation == Relation::LessEqual) {
        tableau.t(i, slack) = Scalar(1);
        tableau.basis[i] = slack++;
      } else {
        if (row.relation == Relation::GreaterEqual) tableau.t(i, slack++) = Scalar(-1);
        tableau.t(i, artificial) = Scalar(1);
        tableau.basis[i] = artificial++;
      }
    }
  }

  LpResult<Scalar> result;
  const int limit = 200 * (m + tableau.columns()) + 1000;

  // Phase 1: minimize the sum of artificials.
  for (int i = 0; i < m; ++i) {
    if (tableau.basis[i] >= first_artificial) tableau.t.row(m) -= tableau.t.row(i);
  }
  for (int k = first_artificial; k < tableau.columns(); ++k) tableau.t(m, k) = Scalar(0);
  if (artificials > 0) {
    const LpStatus phase1 =
        tableau.run(tableau.columns(), tol, result.pivots, limit);
    if (phase1 == LpStatus::IterationLimit) {
      result.status = LpStatus::IterationLimit;
      return result;
    }
    const Scalar infeasibility = -tableau.rhs(m);
    if (infeasibility > tol.feasibility) {
      result.status = LpStatus::Infeasible;
      return result;
    }
    for (int i = 0; i < m; ++i) {
      if (tableau.basis[i] < first_artificial) continue;
      for (int k = 0; k < first_artificial; ++k) {
        const Scalar a = tableau.t(i, k);
        if (a > tol.pivot || a < -tol.pivot) {
          tableau.pivot(i, k);
          break;
        }
      }
    }
  }

  // Phase 2.
  result.status = LpStatus::Optimal;
  if (system.objective()) {
    const Vector& c = *system.objective();
    tableau.t.row(m).setZero();
    for (int j = 0; j < n; ++j) {
      const Map& map = maps[j];
      switch (map.kind) {
        case Kind::Fixed: break;
        case Kind::Lower: tableau.cost(map.first) += c(j); break;
        case Kind::Upper: tableau.cost(map.first) -= c(j); break;
        case Kind::Free:
          tableau.cost(map.first) += c(j);
          tableau.cost(map.second) -= c(j);
          break;
      }
    }
    for (int i = 0; i < m; ++i) {
      const int b = tableau.basis[i];
      if (b >= structural) continue;
      const Scalar cb = tableau.t(m, b);
      if (cb != Scalar(0)) tableau.t.row(m) -= cb * tableau.t.row(i);
    }
    const LpStatus phase2 = tableau.run(first_artificial, tol, result.pivots, limit);
    if (phase2 == LpStatus::IterationLimit) {
      result.status = LpStatus::IterationLimit;
      return result;
    }
    result.status = phase2;
  }

  Vector y = detail::zeros<Scalar>(structural);
  for (int i = 0; i < m; ++i) {
    if (tableau.basis[i] < structural) y(tableau.basis[i]) = tableau.rhs(i);
  }
  result.values.resize(n);
  for (int j = 0; j < n; ++j) {
    const Map& map = maps[j];
    switch (map.kind) {
      case Kind::Fixed: result.values(j) = map.offset; break;
      case Kind::Lower: result.values(j) = map.offset + y(map.first); break;
      case Kind::Upper: result.values(j) = map.offset - y(map.first); break;
      case Kind::Free: result.values(j) = y(map.first) - y(map.second); break;
    }
  }
  if (system.objective()) {
    result.objective = system.objective()->dot(result.values);
  }
  return result;
}

}  // namespace spe
