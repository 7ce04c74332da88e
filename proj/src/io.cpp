#include "nsch/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace nsch {

namespace {

constexpr char kMagic[6] = {'N', 'S', 'C', 'H', 'F', '1'};

void put_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}
void put_u64(std::ofstream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), 8);
}
void put_f64(std::ofstream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), 8);
}

std::uint32_t get_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
std::uint64_t get_u64(std::ifstream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 8);
  return v;
}
double get_f64(std::ifstream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

struct Header {
  std::uint32_t dim = 0;
  std::uint32_t cells[2] = {0, 0};
  double spacing[2] = {0, 0};
  std::uint32_t kind = 0;
  std::uint32_t axis = 0;
  std::uint64_t count = 0;
};

void write_header(std::ofstream& out, const Grid& g, std::uint32_t kind, std::uint32_t axis,
                  std::uint64_t count) {
  out.write(kMagic, 6);
  put_u32(out, std::uint32_t(g.dim()));
  for (int a = 0; a < g.dim(); ++a) put_u32(out, std::uint32_t(g.cells(a)));
  for (int a = 0; a < g.dim(); ++a) put_f64(out, g.spacing(a));
  put_u32(out, kind);
  put_u32(out, axis);
  put_u64(out, count);
}

Header read_header(std::ifstream& in, const std::string& path) {
  char magic[6];
  in.read(magic, 6);
  if (!in || std::memcmp(magic, kMagic, 6) != 0)
    throw Error("'" + path + "' is not a field file (bad magic)");
  Header h;
  h.dim = get_u32(in);
  if (h.dim != 1 && h.dim != 2) throw Error("'" + path + "': unsupported dim");
  for (std::uint32_t a = 0; a < h.dim; ++a) h.cells[a] = get_u32(in);
  for (std::uint32_t a = 0; a < h.dim; ++a) h.spacing[a] = get_f64(in);
  h.kind = get_u32(in);
  h.axis = get_u32(in);
  h.count = get_u64(in);
  if (!in) throw Error("'" + path + "': truncated header");
  return h;
}

}  // namespace

void write_scalar_field(const std::string& path, const ScalarField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_header(out, f.grid, 0, 0, std::uint64_t(f.values.size()));
  for (Index i = 0; i < f.values.size(); ++i) put_f64(out, f.values[i]);
  if (!out) throw Error("write failed for '" + path + "'");
}

ScalarField read_scalar_field(const std::string& path, BcTag tag) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  const Header h = read_header(in, path);
  if (h.kind != 0) throw Error("'" + path + "' does not hold a cell scalar");
  Grid g = (h.dim == 1) ? Grid::make_1d(h.cells[0], h.spacing[0] * h.cells[0])
                        : Grid::make_2d(h.cells[0], h.cells[1], h.spacing[0] * h.cells[0],
                                        h.spacing[1] * h.cells[1]);
  if (Index(h.count) != g.cell_count()) throw Error("'" + path + "': value count mismatch");
  Array v(g.cell_count());
  for (Index i = 0; i < v.size(); ++i) v[i] = get_f64(in);
  if (!in) throw Error("'" + path + "': truncated payload");
  return ScalarField(g, tag, std::move(v));
}

void write_vector_field(const std::string& path_prefix, const VectorField& v) {
  for (int ax = 0; ax < v.grid.dim(); ++ax) {
    const std::string path = path_prefix + (ax == 0 ? "_x.nschf" : "_y.nschf");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    write_header(out, v.grid, 1, std::uint32_t(ax), std::uint64_t(v.comp[ax].size()));
    for (Index i = 0; i < v.comp[ax].size(); ++i) put_f64(out, v.comp[ax][i]);
    if (!out) throw Error("write failed for '" + path + "'");
  }
}

VectorField read_vector_field(const std::string& path_prefix, const Grid& grid) {
  VectorField v(grid);
  for (int ax = 0; ax < grid.dim(); ++ax) {
    const std::string path = path_prefix + (ax == 0 ? "_x.nschf" : "_y.nschf");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    const Header h = read_header(in, path);
    if (h.kind != 1 || int(h.axis) != ax) throw Error("'" + path + "': wrong component");
    if (Index(h.count) != grid.face_count(ax))
      throw Error("'" + path + "': face count mismatch");
    for (Index i = 0; i < v.comp[ax].size(); ++i) v.comp[ax][i] = get_f64(in);
    if (!in) throw Error("'" + path + "': truncated payload");
  }
  return v;
}

void write_field_csv(const std::string& path, const ScalarField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  const Grid& g = f.grid;
  out << (g.dim() == 1 ? "x,value\n" : "x,y,value\n");
  char buf[96];
  const Index ny = (g.dim() == 2) ? g.cells(1) : 1;
  for (Index iy = 0; iy < ny; ++iy)
    for (Index ix = 0; ix < g.cells(0); ++ix) {
      if (g.dim() == 1)
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", g.cell_center(0, ix),
                      f.values[g.cell_index(ix, iy)]);
      else
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", g.cell_center(0, ix),
                      g.cell_center(1, iy), f.values[g.cell_index(ix, iy)]);
      out << buf;
    }
}

namespace {
std::string snap_name(const std::string& dir, const char* base, int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%06d", index);
  return dir + "/" + base + buf;
}
}  // namespace

void write_state(const std::string& dir, const State& s, int index) {
  write_scalar_field(snap_name(dir, "rho", index) + ".nschf", s.rho);
  write_scalar_field(snap_name(dir, "c", index) + ".nschf", s.c);
  write_scalar_field(snap_name(dir, "mu", index) + ".nschf", s.mu);
  write_vector_field(snap_name(dir, "m", index), s.momentum);
}

State read_state(const std::string& dir, const Grid& grid, int index, Scalar eps) {
  State s;
  s.rho = read_scalar_field(snap_name(dir, "rho", index) + ".nschf", BcTag::none);
  s.c = read_scalar_field(snap_name(dir, "c", index) + ".nschf", BcTag::neumann_zero);
  s.mu = read_scalar_field(snap_name(dir, "mu", index) + ".nschf", BcTag::neumann_zero);
  s.momentum = read_vector_field(snap_name(dir, "m", index), grid);
  s.eps = eps;
  if (!s.rho.grid.same_as(grid)) throw Error("snapshot grid does not match the trajectory grid");
  return s;
}

}  // namespace nsch
