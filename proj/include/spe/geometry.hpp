#pragma once

#include "spe/game.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace spe {

struct Hypercube {
  Eigen::VectorXd origin;
  double side = 0.0;

  bool contains(const Eigen::VectorXd& point, double tolerance = 0.0) const {
    return ((point.array() >= origin.array() - tolerance) &&
            (point.array() <= origin.array() + side + tolerance))
        .all();
  }
};

/// A hyperrectangle made of whole lattice cells.
struct Cluster {
  Eigen::VectorXd origin;
  Eigen::VectorXd lengths;

  bool contains(const Eigen::VectorXd& point, double tolerance = 0.0) const {
    return ((point.array() >= origin.array() - tolerance) &&
            (point.array() <= origin.array() + lengths.array() + tolerance))
        .all();
  }
};

/// The half-plane phi * x + psi * y <= lambda, with (phi, psi) of unit length.
struct HalfPlane {
  double phi = 0.0;
  double psi = 0.0;
  double lambda = 0.0;

  double slack(double x, double y) const { return lambda - phi * x - psi * y; }
};

/// A union of interior-disjoint hypercubes of one common side length.
///
/// Cubes live on the lattice base_origin + side * Z^n and are stored by their
/// integer lattice coordinates, kept in lexicographic order. The side length is
/// base_side / 2^generation, so repeated splitting never accumulates rounding.
class CubeSet {
 public:
  CubeSet() = default;
  CubeSet(Eigen::VectorXd base_origin, double base_side, int generation = 0);

  /// Builds a set from explicit origins; all must lie on one lattice of pitch `side`.
  static CubeSet from_origins(const std::vector<Eigen::VectorXd>& origins, double side);

  int dimension() const { return static_cast<int>(base_origin_.size()); }
  int generation() const { return generation_; }
  double side() const { return side_; }
  double base_side() const { return base_side_; }
  const Eigen::VectorXd& base_origin() const { return base_origin_; }

  std::size_t size() const {
    return dimension() == 0 ? 0 : cells_.size() / static_cast<std::size_t>(dimension());
  }
  bool empty() const { return cells_.empty(); }

  std::span<const std::int32_t> cell(std::size_t k) const {
    return {cells_.data() + k * dimension(), static_cast<std::size_t>(dimension())};
  }
  double origin(std::size_t k, int d) const { return base_origin_(d) + side_ * cell(k)[d]; }
  Eigen::VectorXd origin(std::size_t k) const;
  Hypercube cube(std::size_t k) const { return {origin(k), side_}; }

  /// Adds a cell, keeping lexicographic order. Duplicates are ignored.
  void insert(std::span<const std::int32_t> cell);
  void erase(std::size_t k);
  /// Keeps the cubes whose flag is true; `keep` is indexed like the set.
  void retain(const std::vector<bool>& keep);
  std::optional<std::size_t> find(std::span<const std::int32_t> cell) const;

  const std::vector<std::int32_t>& raw_cells() const { return cells_; }
  /// Replaces the contents wholesale; `cells` must be sorted and unique.
  void assign(int generation, std::vector<std::int32_t> cells);

 private:
  Eigen::VectorXd base_origin_;
  double base_side_ = 1.0;
  int generation_ = 0;
  double side_ = 1.0;
  std::vector<std::int32_t> cells_;
};

/// Packs lattice coordinates into one 64-bit key.
std::uint64_t pack_cell(std::span<const std::int32_t> cell);

/// Constant-time membership and point location over a fixed CubeSet.
class CubeLocator {
 public:
  explicit CubeLocator(const CubeSet& cubes);

  std::optional<std::size_t> find(std::span<const std::int32_t> cell) const;
  /// Index of the closed cube containing `point` (within `tolerance`); on
  /// shared faces, the cube with the lexicographically smallest origin wins.
  std::optional<std::size_t> locate(const Eigen::VectorXd& point, double tolerance = 0.0) const;

 private:
  const CubeSet* cubes_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

CubeSet initial_cube(const PayoffBounds& bounds, int players);
CubeSet split_all(const CubeSet& cubes);
Eigen::VectorXd min_origin(const CubeSet& cubes);
std::vector<Cluster> get_clusters(const CubeSet& cubes);
/// Counter-clockwise convex hull of all cube vertices (two dimensions),
/// starting at the lexicographically smallest vertex, without collinear points.
std::vector<Eigen::Vector2d> hull_vertices(const CubeSet& cubes);
/// Hull of the cubes whose `keep` flag is set.
std::vector<Eigen::Vector2d> hull_vertices(const CubeSet& cubes, const std::vector<bool>& keep);
std::vector<HalfPlane> get_halfplanes(const CubeSet& cubes);
std::optional<Hypercube> locate(const Eigen::VectorXd& point, const CubeSet& cubes);

/// Half-planes for the edges of a counter-clockwise polygon.
std::vector<HalfPlane> halfplanes_from_hull(const std::vector<Eigen::Vector2d>& hull);

}  // namespace spe
