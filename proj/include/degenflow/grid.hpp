#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "degenflow/errors.hpp"
#include "degenflow/vec.hpp"

namespace degenflow {

enum class Boundary { ZeroFlux, DirichletZero, Periodic };

inline const char* to_string(Boundary b) {
  switch (b) {
    case Boundary::ZeroFlux: return "zero_flux";
    case Boundary::DirichletZero: return "dirichlet_zero";
    case Boundary::Periodic: return "periodic";
  }
  return "?";
}

inline Boundary boundary_from_string(const std::string& s) {
  if (s == "zero_flux") return Boundary::ZeroFlux;
  if (s == "dirichlet_zero") return Boundary::DirichletZero;
  if (s == "periodic") return Boundary::Periodic;
  throw DomainError("unknown boundary condition '" + s + "'");
}

/// Uniform cell-centered grid on a box in one or two dimensions. Cells are
/// stored row-major with x fastest: index = i + nx * j.
class Grid {
 public:
  Grid(int dims, Vec2 lower, Vec2 upper, std::array<int, 2> cells, Boundary bc)
      : dims_(dims), lower_(lower), upper_(upper), cells_(cells), bc_(bc) {
    if (dims != 1 && dims != 2) throw DomainError("grid dims must be 1 or 2");
    if (dims == 1) {
      cells_[1] = 1;
      lower_[1] = 0.0;
      upper_[1] = 1.0;
    }
    for (int a = 0; a < dims; ++a) {
      if (cells_[a] < 4) throw DomainError("grid needs at least 4 cells per axis");
      h_[a] = (upper_[a] - lower_[a]) / cells_[a];
      if (!(h_[a] > 0.0)) throw DomainError("grid extent must be increasing on every axis");
    }
    if (dims == 1) h_[1] = 1.0;
  }

  /// 1-D grid on [a, b].
  static Grid line(double a, double b, int cells, Boundary bc = Boundary::ZeroFlux) {
    return Grid(1, {a, 0.0}, {b, 1.0}, {cells, 1}, bc);
  }

  /// 2-D grid on [a0, b0] x [a1, b1].
  static Grid plane(Vec2 lower, Vec2 upper, int nx, int ny, Boundary bc = Boundary::ZeroFlux) {
    return Grid(2, lower, upper, {nx, ny}, bc);
  }

  int dims() const { return dims_; }
  int cells(int axis) const { return cells_[static_cast<std::size_t>(axis)]; }
  std::array<int, 2> cells() const { return cells_; }
  double h(int axis) const { return h_[static_cast<std::size_t>(axis)]; }
  Vec2 lower() const { return lower_; }
  Vec2 upper() const { return upper_; }
  Boundary bc() const { return bc_; }
  std::size_t size() const { return static_cast<std::size_t>(cells_[0]) * static_cast<std::size_t>(cells_[1]); }

  /// Cell measure: h in 1-D, hx*hy in 2-D.
  double cell_volume() const { return dims_ == 1 ? h_[0] : h_[0] * h_[1]; }

  double domain_volume() const { return cell_volume() * static_cast<double>(size()); }

  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(cells_[0]) * static_cast<std::size_t>(j);
  }

  Vec2 center(std::size_t idx) const {
    const int i = static_cast<int>(idx % static_cast<std::size_t>(cells_[0]));
    const int j = static_cast<int>(idx / static_cast<std::size_t>(cells_[0]));
    return center(i, j);
  }

  Vec2 center(int i, int j) const {
    return {lower_[0] + (i + 0.5) * h_[0], dims_ == 1 ? 0.0 : lower_[1] + (j + 0.5) * h_[1]};
  }

  /// Faces normal to `axis`, stored as (nx+1)*ny for axis 0 and nx*(ny+1)
  /// for axis 1. Periodic grids keep both copies of the wrap face.
  std::size_t face_count(int axis) const {
    if (axis >= dims_) return 0;
    return axis == 0 ? static_cast<std::size_t>(cells_[0] + 1) * static_cast<std::size_t>(cells_[1])
                     : static_cast<std::size_t>(cells_[0]) * static_cast<std::size_t>(cells_[1] + 1);
  }

  std::size_t face_index(int axis, int i, int j) const {
    return axis == 0 ? static_cast<std::size_t>(i) + static_cast<std::size_t>(cells_[0] + 1) * static_cast<std::size_t>(j)
                     : static_cast<std::size_t>(i) + static_cast<std::size_t>(cells_[0]) * static_cast<std::size_t>(j);
  }

  /// Position of face (i, j) normal to `axis`; face i sits left of cell i.
  Vec2 face_center(int axis, int i, int j) const {
    if (axis == 0) return {lower_[0] + i * h_[0], dims_ == 1 ? 0.0 : lower_[1] + (j + 0.5) * h_[1]};
    return {lower_[0] + (i + 0.5) * h_[0], lower_[1] + j * h_[1]};
  }

  bool operator==(const Grid& o) const {
    return dims_ == o.dims_ && lower_ == o.lower_ && upper_ == o.upper_ && cells_ == o.cells_ && bc_ == o.bc_;
  }

 private:
  int dims_;
  Vec2 lower_, upper_;
  std::array<int, 2> cells_;
  Vec2 h_{1.0, 1.0};
  Boundary bc_;
};

/// One real per cell.
struct ScalarField {
  std::shared_ptr<const Grid> grid;
  std::vector<double> values;

  ScalarField() = default;
  ScalarField(std::shared_ptr<const Grid> g, double fill = 0.0) : grid(std::move(g)), values(grid->size(), fill) {}
  ScalarField(std::shared_ptr<const Grid> g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid->size()) throw DomainError("field value count does not match grid cell count");
  }

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }

  bool nonnegative() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return v >= 0.0; });
  }
};

/// The discrete solution (u^1, ..., u^k) at one time.
struct StateVector {
  std::vector<ScalarField> components;
  double time = 0.0;

  StateVector() = default;
  StateVector(std::shared_ptr<const Grid> g, int k, double t = 0.0) : time(t) {
    if (k < 1) throw DomainError("state needs at least one component");
    for (int i = 0; i < k; ++i) components.emplace_back(g);
  }

  const Grid& grid() const { return *components.front().grid; }
  std::shared_ptr<const Grid> grid_ptr() const { return components.front().grid; }
  int k() const { return static_cast<int>(components.size()); }
  ScalarField& operator[](std::size_t i) { return components[i]; }
  const ScalarField& operator[](std::size_t i) const { return components[i]; }

  bool nonnegative() const {
    return std::all_of(components.begin(), components.end(), [](const ScalarField& f) { return f.nonnegative(); });
  }
};

// ---------------------------------------------------------------------------
// Regions

struct Ball {
  Vec2 center{0.0, 0.0};
  double radius = 0.0;
};

struct Box {
  Vec2 lower{0.0, 0.0};
  Vec2 upper{0.0, 0.0};
};

using Region = std::variant<Ball, Box>;

/// Membership is decided on cell centers.
inline bool contains(const Region& r, Vec2 x, int dims) {
  if (const auto* b = std::get_if<Ball>(&r)) {
    const double dx = x[0] - b->center[0];
    const double dy = dims == 1 ? 0.0 : x[1] - b->center[1];
    return dx * dx + dy * dy < b->radius * b->radius;
  }
  const auto& bx = std::get<Box>(r);
  for (int a = 0; a < dims; ++a)
    if (x[static_cast<std::size_t>(a)] < bx.lower[static_cast<std::size_t>(a)] ||
        x[static_cast<std::size_t>(a)] > bx.upper[static_cast<std::size_t>(a)])
      return false;
  return true;
}

/// Cells whose centers lie in the region.
inline std::vector<std::size_t> cells_in(const Grid& g, const Region& r) {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < g.size(); ++c)
    if (contains(r, g.center(c), g.dims())) out.push_back(c);
  return out;
}

/// True when the region lies inside the closed grid box.
inline bool region_inside(const Grid& g, const Region& r) {
  if (const auto* b = std::get_if<Ball>(&r)) {
    for (int a = 0; a < g.dims(); ++a) {
      const auto s = static_cast<std::size_t>(a);
      if (b->center[s] - b->radius < g.lower()[s] - 1e-12 || b->center[s] + b->radius > g.upper()[s] + 1e-12)
        return false;
    }
    return true;
  }
  const auto& bx = std::get<Box>(r);
  for (int a = 0; a < g.dims(); ++a) {
    const auto s = static_cast<std::size_t>(a);
    if (bx.lower[s] < g.lower()[s] - 1e-12 || bx.upper[s] > g.upper()[s] + 1e-12) return false;
  }
  return true;
}

/// Space-time cylinder (x0, t0) + B_R x (-depth, 0].
struct Cylinder {
  Vec2 center{0.0, 0.0};
  double t0 = 0.0;
  double radius = 0.0;
  double depth = 0.0;
  bool clipped = false;

  Cylinder() = default;
  Cylinder(Vec2 c, double top, double r, double d) : center(c), t0(top), radius(r), depth(d) {
    if (!(r > 0.0) || !(d > 0.0)) throw DomainError("cylinder needs R > 0 and depth > 0");
  }

  double t_bottom() const { return t0 - depth; }
  Ball ball() const { return Ball{center, radius}; }

  /// Clip the time extent to [t_min, t_max] and the ball to the grid box,
  /// recording whether anything was cut.
  Cylinder clipped_to(const Grid& g, double t_min, double t_max) const {
    Cylinder c = *this;
    if (c.t0 > t_max) {
      c.t0 = t_max;
      c.clipped = true;
    }
    if (c.t0 - c.depth < t_min) {
      c.depth = c.t0 - t_min;
      c.clipped = true;
    }
    if (!region_inside(g, c.ball())) c.clipped = true;
    return c;
  }
};

// ---------------------------------------------------------------------------
// Stencils

/// Per-axis face values (layout as Grid::face_index).
struct FaceValues {
  std::array<std::vector<double>, 2> axis;
};

namespace detail {

// Neighbor value across a boundary face, by ghost-cell rule. `inner` is the
// adjacent interior value; `wrap` is the value on the opposite side.
inline double ghost(Boundary bc, double inner, double wrap) {
  switch (bc) {
    case Boundary::ZeroFlux: return inner;
    case Boundary::DirichletZero: return -inner;
    case Boundary::Periodic: return wrap;
  }
  return inner;
}

}  // namespace detail

/// Normal differences (f_right - f_left)/h on every face. Boundary faces:
/// ZeroFlux gives 0, DirichletZero differences against the reflected-negated
/// ghost (one-sided against 0), Periodic wraps.
inline FaceValues face_gradient(const ScalarField& f) {
  const Grid& g = *f.grid;
  const int nx = g.cells(0), ny = g.cells(1);
  FaceValues out;
  for (int a = 0; a < g.dims(); ++a) out.axis[static_cast<std::size_t>(a)].assign(g.face_count(a), 0.0);

  auto& fx = out.axis[0];
  const double hx = g.h(0);
  for (int j = 0; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) fx[g.face_index(0, i, j)] = (f[g.index(i, j)] - f[g.index(i - 1, j)]) / hx;
    const double first = f[g.index(0, j)], last = f[g.index(nx - 1, j)];
    fx[g.face_index(0, 0, j)] = (first - detail::ghost(g.bc(), first, last)) / hx;
    fx[g.face_index(0, nx, j)] = (detail::ghost(g.bc(), last, first) - last) / hx;
  }
  if (g.dims() == 2) {
    auto& fy = out.axis[1];
    const double hy = g.h(1);
    for (int i = 0; i < nx; ++i) {
      for (int j = 1; j < ny; ++j) fy[g.face_index(1, i, j)] = (f[g.index(i, j)] - f[g.index(i, j - 1)]) / hy;
      const double first = f[g.index(i, 0)], last = f[g.index(i, ny - 1)];
      fy[g.face_index(1, i, 0)] = (first - detail::ghost(g.bc(), first, last)) / hy;
      fy[g.face_index(1, i, ny)] = (detail::ghost(g.bc(), last, first) - last) / hy;
    }
  }
  return out;
}

/// Zero the boundary faces of a ZeroFlux grid and make the two copies of a
/// periodic wrap face agree (the left copy wins).
inline void apply_boundary_flux(const Grid& g, FaceValues& F) {
  const int nx = g.cells(0), ny = g.cells(1);
  for (int j = 0; j < ny; ++j) {
    auto& a = F.axis[0][g.face_index(0, 0, j)];
    auto& b = F.axis[0][g.face_index(0, nx, j)];
    if (g.bc() == Boundary::ZeroFlux) a = b = 0.0;
    if (g.bc() == Boundary::Periodic) b = a;
  }
  if (g.dims() == 2) {
    for (int i = 0; i < nx; ++i) {
      auto& a = F.axis[1][g.face_index(1, i, 0)];
      auto& b = F.axis[1][g.face_index(1, i, ny)];
      if (g.bc() == Boundary::ZeroFlux) a = b = 0.0;
      if (g.bc() == Boundary::Periodic) b = a;
    }
  }
}

/// Cell value = sum over faces of outward flux / h, i.e. (F_right - F_left)/h
/// per axis. With zero boundary flux the cell sum telescopes to zero.
inline ScalarField divergence(std::shared_ptr<const Grid> gp, const FaceValues& F) {
  const Grid& g = *gp;
  ScalarField out(gp);
  const int nx = g.cells(0), ny = g.cells(1);
  for (int a = 0; a < g.dims(); ++a)
    if (F.axis[static_cast<std::size_t>(a)].size() != g.face_count(a))
      throw DomainError("divergence: face count mismatch");
  const double hx = g.h(0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      out[g.index(i, j)] = (F.axis[0][g.face_index(0, i + 1, j)] - F.axis[0][g.face_index(0, i, j)]) / hx;
  if (g.dims() == 2) {
    const double hy = g.h(1);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        out[g.index(i, j)] += (F.axis[1][g.face_index(1, i, j + 1)] - F.axis[1][g.face_index(1, i, j)]) / hy;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quadrature and extrema

/// Midpoint rule over the whole grid: cell volume times the plain sum.
inline double integrate(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  return f.grid->cell_volume() * s;
}

struct RegionIntegral {
  double value = 0.0;
  bool empty = false;  ///< no cell center fell inside the region
};

inline RegionIntegral integrate(const ScalarField& f, const Region& r) {
  const Grid& g = *f.grid;
  RegionIntegral out;
  double s = 0.0;
  std::size_t hits = 0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (contains(r, g.center(c), g.dims())) {
      s += f[c];
      ++hits;
    }
  }
  out.value = g.cell_volume() * s;
  out.empty = hits == 0;
  return out;
}

struct Extrema {
  double inf = 0.0;
  double sup = 0.0;
};

inline Extrema extrema(const ScalarField& f) {
  const auto [lo, hi] = std::minmax_element(f.values.begin(), f.values.end());
  return {*lo, *hi};
}

inline Extrema extrema(const ScalarField& f, const Region& r) {
  const Grid& g = *f.grid;
  Extrema e{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  bool any = false;
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (!contains(r, g.center(c), g.dims())) continue;
    e.inf = std::min(e.inf, f[c]);
    e.sup = std::max(e.sup, f[c]);
    any = true;
  }
  if (!any) throw DomainError("extrema: region contains no cell centers");
  return e;
}

/// Mass in the outermost layer of cells (the certificate that a truncated
/// box still behaves like the whole space).
inline double boundary_layer_mass(const ScalarField& f) {
  const Grid& g = *f.grid;
  const int nx = g.cells(0), ny = g.cells(1);
  double s = 0.0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const bool edge = i == 0 || i == nx - 1 || (g.dims() == 2 && (j == 0 || j == ny - 1));
      if (edge) s += std::abs(f[g.index(i, j)]);
    }
  return g.cell_volume() * s;
}

}  // namespace degenflow
