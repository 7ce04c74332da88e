#pragma once

#include "nsch/types.hpp"

#include <array>

namespace nsch {

/// Axis-aligned rectangle in 1D or 2D with uniform spacing per axis.
/// Scalars live at cell centers, velocity components at interior faces
/// (MAC layout). Boundary faces are not stored; a velocity field is
/// Dirichlet-zero there by construction.
class Grid {
 public:
  /// Minimal valid 1D grid; real grids come from the factories.
  Grid() = default;

  static Grid make_1d(Index nx, Scalar lx);
  static Grid make_2d(Index nx, Index ny, Scalar lx, Scalar ly);

  int dim() const { return dim_; }
  Index cells(int axis) const { return cells_[axis]; }
  Scalar length(int axis) const { return lengths_[axis]; }
  Scalar spacing(int axis) const { return spacing_[axis]; }
  Scalar min_spacing() const;

  Index cell_count() const { return cells_[0] * cells_[1]; }
  Scalar cell_volume() const;
  Scalar domain_volume() const { return lengths_[0] * (dim_ == 2 ? lengths_[1] : 1.0); }

  /// Interior faces normal to `axis` (boundary faces excluded).
  Index face_count(int axis) const;
  Index total_face_count() const;

  /// Cell linear index, x fastest.
  Index cell_index(Index ix, Index iy = 0) const { return iy * cells_[0] + ix; }

  /// Interior-face linear index. For axis 0 the face sits between cells
  /// (fx, iy) and (fx+1, iy); for axis 1 between (ix, fy) and (ix, fy+1).
  Index face_index(int axis, Index f, Index transverse) const;

  Scalar cell_center(int axis, Index i) const { return (Scalar(i) + 0.5) * spacing_[axis]; }
  Scalar face_coord(int axis, Index f) const { return Scalar(f + 1) * spacing_[axis]; }

  bool same_as(const Grid& other) const;

 private:
  int dim_ = 1;
  std::array<Index, 2> cells_{2, 1};
  std::array<Scalar, 2> lengths_{1.0, 1.0};
  std::array<Scalar, 2> spacing_{0.5, 1.0};
};

enum class BcTag { neumann_zero, none, dirichlet_zero };

/// Cell-centered scalar samples with a boundary-condition tag.
struct ScalarField {
  ScalarField() = default;
  ScalarField(const Grid& g, BcTag tag);
  ScalarField(const Grid& g, BcTag tag, Array values);

  Grid grid;
  BcTag bc_tag = BcTag::none;
  Array values;

  Scalar& operator()(Index ix, Index iy = 0) { return values[grid.cell_index(ix, iy)]; }
  Scalar operator()(Index ix, Index iy = 0) const { return values[grid.cell_index(ix, iy)]; }

  bool finite() const { return values.isFinite().all(); }
};

/// Face-centered vector components, one array per axis, interior faces only.
/// With the dirichlet_zero tag the boundary faces are identically zero by
/// construction, which makes divergence sums telescope exactly.
struct VectorField {
  VectorField() = default;
  explicit VectorField(const Grid& g);

  Grid grid;
  BcTag bc_tag = BcTag::dirichlet_zero;
  std::array<Array, 2> comp;

  /// Component value at a global face index (0..cells) along `axis`;
  /// returns 0 for the two boundary faces.
  Scalar at_global(int axis, Index gface, Index transverse) const;

  bool finite() const;
  Scalar max_abs() const;
};

/// Cell-centered d-by-d tensor samples, stored as dim*dim arrays in
/// row-major entry order (xx, xy, yx, yy).
struct TensorField {
  TensorField() = default;
  explicit TensorField(const Grid& g);

  Grid grid;
  std::array<Array, 4> entry;

  int dim() const { return grid.dim(); }
  Array& at(int a, int b) { return entry[a * grid.dim() + b]; }
  const Array& at(int a, int b) const { return entry[a * grid.dim() + b]; }
};

// Discrete calculus. All operators pair so that
//   <divergence(v), f>_cells = -<v, gradient(f)>_faces
// holds to machine precision for Neumann-tagged f and Dirichlet-zero v.

/// Face-centered difference of cell values along each axis.
VectorField gradient(const ScalarField& f);

/// Cell-centered net flux; exact discrete divergence theorem under the
/// dirichlet_zero tag.
ScalarField divergence(const VectorField& v);

/// divergence(gradient(f)) with Neumann-zero ghosts; requires the tag.
ScalarField laplacian_neumann(const ScalarField& f);

/// Matrix of laplacian_neumann acting on the flat cell vector.
Eigen::SparseMatrix<Scalar> laplacian_matrix(const Grid& g);

/// Full velocity gradient tensor at cell centers. Diagonal entries use the
/// bounding faces; off-diagonal entries use centered differences of
/// face-averaged components with reflected (negated) wall ghosts.
TensorField velocity_gradient(const VectorField& u);

/// Arithmetic face-to-cell average of each component.
std::array<Array, 2> face_to_cell(const VectorField& v);

/// Arithmetic cell-to-face average along `axis` (used for face densities).
Array cell_to_face(const ScalarField& f, int axis);

/// <a, b> over cells, weighted by cell volume.
Scalar cell_inner(const ScalarField& a, const ScalarField& b);

/// <a, b> over all interior faces, weighted by cell volume.
Scalar face_inner(const VectorField& a, const VectorField& b);

}  // namespace nsch
