#include "nsch/grid.hpp"

#include <cmath>
#include <vector>

namespace nsch {

Grid Grid::make_1d(Index nx, Scalar lx) {
  if (nx < 2 || lx <= 0.0) throw Error("grid: need nx >= 2 and lx > 0");
  Grid g;
  g.dim_ = 1;
  g.cells_ = {nx, 1};
  g.lengths_ = {lx, 1.0};
  g.spacing_ = {lx / Scalar(nx), 1.0};
  return g;
}

Grid Grid::make_2d(Index nx, Index ny, Scalar lx, Scalar ly) {
  if (nx < 2 || ny < 2 || lx <= 0.0 || ly <= 0.0)
    throw Error("grid: need nx, ny >= 2 and positive lengths");
  Grid g;
  g.dim_ = 2;
  g.cells_ = {nx, ny};
  g.lengths_ = {lx, ly};
  g.spacing_ = {lx / Scalar(nx), ly / Scalar(ny)};
  return g;
}

Scalar Grid::min_spacing() const {
  return dim_ == 1 ? spacing_[0] : std::min(spacing_[0], spacing_[1]);
}

Scalar Grid::cell_volume() const {
  return dim_ == 1 ? spacing_[0] : spacing_[0] * spacing_[1];
}

Index Grid::face_count(int axis) const {
  if (axis >= dim_) return 0;
  const Index along = cells_[axis] - 1;
  const Index other = (dim_ == 2) ? cells_[1 - axis] : 1;
  return along * other;
}

Index Grid::total_face_count() const { return face_count(0) + face_count(1); }

Index Grid::face_index(int axis, Index f, Index transverse) const {
  if (axis == 0) return transverse * (cells_[0] - 1) + f;
  return f * cells_[0] + transverse;
}

bool Grid::same_as(const Grid& o) const {
  return dim_ == o.dim_ && cells_ == o.cells_ && lengths_ == o.lengths_;
}

ScalarField::ScalarField(const Grid& g, BcTag t)
    : grid(g), bc_tag(t), values(Array::Zero(g.cell_count())) {}

ScalarField::ScalarField(const Grid& g, BcTag t, Array v)
    : grid(g), bc_tag(t), values(std::move(v)) {
  if (values.size() != grid.cell_count())
    throw Error("ScalarField: value count does not match the grid");
}

VectorField::VectorField(const Grid& g) : grid(g) {
  for (int ax = 0; ax < g.dim(); ++ax) comp[ax] = Array::Zero(g.face_count(ax));
}

Scalar VectorField::at_global(int axis, Index gface, Index transverse) const {
  if (gface <= 0 || gface >= grid.cells(axis)) return 0.0;
  return comp[axis][grid.face_index(axis, gface - 1, transverse)];
}

bool VectorField::finite() const {
  for (int ax = 0; ax < grid.dim(); ++ax)
    if (!comp[ax].isFinite().all()) return false;
  return true;
}

Scalar VectorField::max_abs() const {
  Scalar m = 0.0;
  for (int ax = 0; ax < grid.dim(); ++ax)
    if (comp[ax].size() > 0) m = std::max(m, comp[ax].abs().maxCoeff());
  return m;
}

TensorField::TensorField(const Grid& g) : grid(g) {
  const int n = g.dim() * g.dim();
  for (int k = 0; k < n; ++k) entry[k] = Array::Zero(g.cell_count());
}

VectorField gradient(const ScalarField& f) {
  if (!f.finite()) throw Error("gradient: field has non-finite values");
  const Grid& g = f.grid;
  VectorField out(g);
  for (int ax = 0; ax < g.dim(); ++ax) {
    const Scalar inv_h = 1.0 / g.spacing(ax);
    const Index n_along = g.cells(ax) - 1;
    const Index n_other = (g.dim() == 2) ? g.cells(1 - ax) : 1;
    for (Index t = 0; t < n_other; ++t) {
      for (Index fc = 0; fc < n_along; ++fc) {
        const Index lo = (ax == 0) ? g.cell_index(fc, t) : g.cell_index(t, fc);
        const Index hi = (ax == 0) ? g.cell_index(fc + 1, t) : g.cell_index(t, fc + 1);
        out.comp[ax][g.face_index(ax, fc, t)] = (f.values[hi] - f.values[lo]) * inv_h;
      }
    }
  }
  return out;
}

ScalarField divergence(const VectorField& v) {
  if (!v.finite()) throw Error("divergence: field has non-finite values");
  const Grid& g = v.grid;
  ScalarField out(g, BcTag::none);
  for (int ax = 0; ax < g.dim(); ++ax) {
    const Scalar inv_h = 1.0 / g.spacing(ax);
    const Index n_along = g.cells(ax);
    const Index n_other = (g.dim() == 2) ? g.cells(1 - ax) : 1;
    for (Index t = 0; t < n_other; ++t) {
      for (Index i = 0; i < n_along; ++i) {
        const Scalar lo = v.at_global(ax, i, t);
        const Scalar hi = v.at_global(ax, i + 1, t);
        const Index cell = (ax == 0) ? g.cell_index(i, t) : g.cell_index(t, i);
        out.values[cell] += (hi - lo) * inv_h;
      }
    }
  }
  return out;
}

ScalarField laplacian_neumann(const ScalarField& f) {
  if (f.bc_tag != BcTag::neumann_zero)
    throw Error("laplacian_neumann: field must carry the neumann_zero tag");
  return divergence(gradient(f));
}

Eigen::SparseMatrix<Scalar> laplacian_matrix(const Grid& g) {
  const Index n = g.cell_count();
  std::vector<Eigen::Triplet<Scalar>> trip;
  trip.reserve(std::size_t(n) * 5);
  const Index nx = g.cells(0);
  const Index ny = (g.dim() == 2) ? g.cells(1) : 1;
  for (Index iy = 0; iy < ny; ++iy) {
    for (Index ix = 0; ix < nx; ++ix) {
      const Index c = g.cell_index(ix, iy);
      const Scalar wx = 1.0 / (g.spacing(0) * g.spacing(0));
      if (ix > 0) {
        trip.emplace_back(c, g.cell_index(ix - 1, iy), wx);
        trip.emplace_back(c, c, -wx);
      }
      if (ix + 1 < nx) {
        trip.emplace_back(c, g.cell_index(ix + 1, iy), wx);
        trip.emplace_back(c, c, -wx);
      }
      if (g.dim() == 2) {
        const Scalar wy = 1.0 / (g.spacing(1) * g.spacing(1));
        if (iy > 0) {
          trip.emplace_back(c, g.cell_index(ix, iy - 1), wy);
          trip.emplace_back(c, c, -wy);
        }
        if (iy + 1 < ny) {
          trip.emplace_back(c, g.cell_index(ix, iy + 1), wy);
          trip.emplace_back(c, c, -wy);
        }
      }
    }
  }
  Eigen::SparseMatrix<Scalar> L(n, n);
  L.setFromTriplets(trip.begin(), trip.end());
  return L;
}

namespace {

// Face-averaged normal component at a cell, for off-diagonal gradients.
Scalar cell_avg(const VectorField& u, int axis, Index ix, Index iy) {
  const Index along = (axis == 0) ? ix : iy;
  const Index transverse = (axis == 0) ? iy : ix;
  return 0.5 * (u.at_global(axis, along, transverse) + u.at_global(axis, along + 1, transverse));
}

// Same, with negated mirror ghosts past the walls so the wall value is zero.
Scalar cell_avg_ghost(const VectorField& u, int axis, Index ix, Index iy) {
  const Grid& g = u.grid;
  const Index nx = g.cells(0);
  const Index ny = g.cells(1);
  Index cx = ix, cy = iy;
  Scalar sign = 1.0;
  if (cx < 0) { cx = 0; sign = -sign; }
  if (cx >= nx) { cx = nx - 1; sign = -sign; }
  if (cy < 0) { cy = 0; sign = -sign; }
  if (cy >= ny) { cy = ny - 1; sign = -sign; }
  return sign * cell_avg(u, axis, cx, cy);
}

}  // namespace

TensorField velocity_gradient(const VectorField& u) {
  const Grid& g = u.grid;
  TensorField t(g);
  const Index nx = g.cells(0);
  const Index ny = (g.dim() == 2) ? g.cells(1) : 1;
  const Scalar inv_hx = 1.0 / g.spacing(0);
  for (Index iy = 0; iy < ny; ++iy) {
    for (Index ix = 0; ix < nx; ++ix) {
      const Index c = g.cell_index(ix, iy);
      t.at(0, 0)[c] = (u.at_global(0, ix + 1, iy) - u.at_global(0, ix, iy)) * inv_hx;
    }
  }
  if (g.dim() == 1) return t;

  const Scalar inv_hy = 1.0 / g.spacing(1);
  for (Index iy = 0; iy < ny; ++iy) {
    for (Index ix = 0; ix < nx; ++ix) {
      const Index c = g.cell_index(ix, iy);
      t.at(1, 1)[c] = (u.at_global(1, iy + 1, ix) - u.at_global(1, iy, ix)) * inv_hy;
      t.at(0, 1)[c] = (cell_avg_ghost(u, 0, ix, iy + 1) - cell_avg_ghost(u, 0, ix, iy - 1)) *
                      (0.5 * inv_hy);
      t.at(1, 0)[c] = (cell_avg_ghost(u, 1, ix + 1, iy) - cell_avg_ghost(u, 1, ix - 1, iy)) *
                      (0.5 * inv_hx);
    }
  }
  return t;
}

std::array<Array, 2> face_to_cell(const VectorField& v) {
  const Grid& g = v.grid;
  std::array<Array, 2> out;
  const Index nx = g.cells(0);
  const Index ny = (g.dim() == 2) ? g.cells(1) : 1;
  for (int ax = 0; ax < g.dim(); ++ax) {
    out[ax] = Array::Zero(g.cell_count());
    for (Index iy = 0; iy < ny; ++iy)
      for (Index ix = 0; ix < nx; ++ix)
        out[ax][g.cell_index(ix, iy)] = cell_avg(v, ax, ix, iy);
  }
  return out;
}

Array cell_to_face(const ScalarField& f, int axis) {
  const Grid& g = f.grid;
  Array out = Array::Zero(g.face_count(axis));
  const Index n_along = g.cells(axis) - 1;
  const Index n_other = (g.dim() == 2) ? g.cells(1 - axis) : 1;
  for (Index t = 0; t < n_other; ++t) {
    for (Index fc = 0; fc < n_along; ++fc) {
      const Index lo = (axis == 0) ? g.cell_index(fc, t) : g.cell_index(t, fc);
      const Index hi = (axis == 0) ? g.cell_index(fc + 1, t) : g.cell_index(t, fc + 1);
      out[g.face_index(axis, fc, t)] = 0.5 * (f.values[lo] + f.values[hi]);
    }
  }
  return out;
}

Scalar cell_inner(const ScalarField& a, const ScalarField& b) {
  if (!a.grid.same_as(b.grid)) throw Error("cell_inner: mismatched grids");
  return (a.values * b.values).sum() * a.grid.cell_volume();
}

Scalar face_inner(const VectorField& a, const VectorField& b) {
  if (!a.grid.same_as(b.grid)) throw Error("face_inner: mismatched grids");
  Scalar s = 0.0;
  for (int ax = 0; ax < a.grid.dim(); ++ax) s += (a.comp[ax] * b.comp[ax]).sum();
  return s * a.grid.cell_volume();
}

}  // namespace nsch
