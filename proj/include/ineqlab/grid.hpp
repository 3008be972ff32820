#ifndef INEQLAB_GRID_HPP
#define INEQLAB_GRID_HPP

// Uniform tensor grids on [0,extent] (1D) or [0,ex]x[0,ey] (2D) with
// homogeneous Neumann boundary treatment. All difference operators mirror
// ghost nodes across the boundary (even reflection), which makes the
// discrete Laplacian exactly self-adjoint under the trapezoidal weights
// and gives integrate(laplacian(f)) == 0 to round-off.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace ineqlab {

// Nodal values below this are treated as violating positivity requirements.
inline constexpr double positivity_floor = 1e-12;

struct Grid {
    int dim = 1;                          // 1 or 2
    std::array<int, 2> points{4, 1};      // nodes per axis (>= 4 on active axes)
    std::array<double, 2> extent{1.0, 1.0};

    double spacing(int axis) const { return extent[axis] / (points[axis] - 1); }
    std::size_t size() const {
        return static_cast<std::size_t>(points[0]) * (dim == 2 ? points[1] : 1);
    }
    std::size_t index(int ix, int iy = 0) const {
        return static_cast<std::size_t>(iy) * points[0] + ix;
    }
    double coord(int i, int axis) const {
        return extent[axis] * static_cast<double>(i) / (points[axis] - 1);
    }
    double volume() const { return dim == 2 ? extent[0] * extent[1] : extent[0]; }
};

inline Grid make_grid_1d(int points, double extent = 1.0) {
    if (points < 4) throw DomainError("grid needs at least 4 points per axis");
    if (!(extent > 0.0)) throw DomainError("grid extent must be positive");
    Grid g;
    g.dim = 1;
    g.points = {points, 1};
    g.extent = {extent, 1.0};
    return g;
}

inline Grid make_grid_2d(int px, int py, double ex = 1.0, double ey = 1.0) {
    if (px < 4 || py < 4) throw DomainError("grid needs at least 4 points per axis");
    if (!(ex > 0.0) || !(ey > 0.0)) throw DomainError("grid extent must be positive");
    Grid g;
    g.dim = 2;
    g.points = {px, py};
    g.extent = {ex, ey};
    return g;
}

// Nodal scalar field. Values are stored row-major (x fastest).
struct Field {
    Grid grid;
    std::vector<double> values;

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
};

inline Field make_field(const Grid& g, double fill = 0.0) {
    return Field{g, std::vector<double>(g.size(), fill)};
}

inline Field make_field(const Grid& g, const std::function<double(double, double)>& fn) {
    Field f = make_field(g);
    if (g.dim == 1) {
        for (int i = 0; i < g.points[0]; ++i) f.values[i] = fn(g.coord(i, 0), 0.0);
    } else {
        for (int iy = 0; iy < g.points[1]; ++iy)
            for (int ix = 0; ix < g.points[0]; ++ix)
                f.values[g.index(ix, iy)] = fn(g.coord(ix, 0), g.coord(iy, 1));
    }
    return f;
}

namespace detail {
// Mirror an out-of-range node index back into the grid (even reflection).
inline int reflect(int i, int n) {
    if (i < 0) return -i;
    if (i >= n) return 2 * n - 2 - i;
    return i;
}
} // namespace detail

// Trapezoidal quadrature weight of node (half spacing at boundary nodes).
inline double node_weight(const Grid& g, int ix, int iy = 0) {
    const double hx = g.spacing(0);
    double w = (ix == 0 || ix == g.points[0] - 1) ? 0.5 * hx : hx;
    if (g.dim == 2) {
        const double hy = g.spacing(1);
        w *= (iy == 0 || iy == g.points[1] - 1) ? 0.5 * hy : hy;
    }
    return w;
}

inline double integrate(const Field& f) {
    const Grid& g = f.grid;
    double acc = 0.0;
    if (g.dim == 1) {
        for (int i = 0; i < g.points[0]; ++i) acc += node_weight(g, i) * f.values[i];
    } else {
        for (int iy = 0; iy < g.points[1]; ++iy)
            for (int ix = 0; ix < g.points[0]; ++ix)
                acc += node_weight(g, ix, iy) * f.values[g.index(ix, iy)];
    }
    return acc;
}

// Face-difference pairing D(f, g) = sum over faces of (df)(dg)/h weighted by
// the transverse trapezoid factor. It is the exact discrete partner of the
// mirrored Laplacian: integrate(laplacian(f) * g) == -dirichlet_form(f, g)
// to round-off, which the diagnostics lean on.
inline double dirichlet_form(const Field& f, const Field& g_) {
    const Grid& g = f.grid;
    const int nx = g.points[0];
    const int ny = g.dim == 2 ? g.points[1] : 1;
    const double hx = g.spacing(0);
    double acc = 0.0;
    for (int iy = 0; iy < ny; ++iy) {
        double wt = 1.0;
        if (g.dim == 2)
            wt = (iy == 0 || iy == ny - 1) ? 0.5 * g.spacing(1) : g.spacing(1);
        for (int ix = 0; ix + 1 < nx; ++ix) {
            const std::size_t a = g.index(ix, iy), b = g.index(ix + 1, iy);
            acc += wt * (f.values[b] - f.values[a]) * (g_.values[b] - g_.values[a]) / hx;
        }
    }
    if (g.dim == 2) {
        const double hy = g.spacing(1);
        for (int ix = 0; ix < nx; ++ix) {
            const double wt = (ix == 0 || ix == nx - 1) ? 0.5 * hx : hx;
            for (int iy = 0; iy + 1 < ny; ++iy) {
                const std::size_t a = g.index(ix, iy), b = g.index(ix, iy + 1);
                acc +=
                    wt * (f.values[b] - f.values[a]) * (g_.values[b] - g_.values[a]) / hy;
            }
        }
    }
    return acc;
}

// Second difference along one axis with mirrored ghosts. At a boundary node
// the stencil degenerates to 2*(f[inner] - f[node])/h^2.
inline Field laplacian(const Field& f) {
    const Grid& g = f.grid;
    Field out = make_field(g);
    const int nx = g.points[0];
    const double ihx2 = 1.0 / (g.spacing(0) * g.spacing(0));
    if (g.dim == 1) {
        for (int i = 0; i < nx; ++i) {
            const int l = detail::reflect(i - 1, nx);
            const int r = detail::reflect(i + 1, nx);
            out.values[i] = (f.values[l] - 2.0 * f.values[i] + f.values[r]) * ihx2;
        }
        return out;
    }
    const int ny = g.points[1];
    const double ihy2 = 1.0 / (g.spacing(1) * g.spacing(1));
    for (int iy = 0; iy < ny; ++iy) {
        const int d = detail::reflect(iy - 1, ny);
        const int u = detail::reflect(iy + 1, ny);
        for (int ix = 0; ix < nx; ++ix) {
            const int l = detail::reflect(ix - 1, nx);
            const int r = detail::reflect(ix + 1, nx);
            const double c = f.values[g.index(ix, iy)];
            out.values[g.index(ix, iy)] =
                (f.values[g.index(l, iy)] - 2.0 * c + f.values[g.index(r, iy)]) * ihx2 +
                (f.values[g.index(ix, d)] - 2.0 * c + f.values[g.index(ix, u)]) * ihy2;
        }
    }
    return out;
}

// Centered first difference along `axis`; the mirrored ghost makes the
// normal component vanish identically at boundary nodes.
inline Field gradient_component(const Field& f, int axis) {
    const Grid& g = f.grid;
    Field out = make_field(g);
    const int nx = g.points[0];
    const int ny = g.dim == 2 ? g.points[1] : 1;
    const int n = g.points[axis];
    const double i2h = 1.0 / (2.0 * g.spacing(axis));
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const int i = axis == 0 ? ix : iy;
            const int m = detail::reflect(i - 1, n);
            const int p = detail::reflect(i + 1, n);
            const std::size_t km = axis == 0 ? g.index(m, iy) : g.index(ix, m);
            const std::size_t kp = axis == 0 ? g.index(p, iy) : g.index(ix, p);
            out.values[g.index(ix, iy)] = (f.values[kp] - f.values[km]) * i2h;
        }
    }
    return out;
}

inline Field gradient_squared(const Field& f) {
    Field gx = gradient_component(f, 0);
    Field out = make_field(f.grid);
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = gx.values[i] * gx.values[i];
    if (f.grid.dim == 2) {
        Field gy = gradient_component(f, 1);
        for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += gy.values[i] * gy.values[i];
    }
    return out;
}

namespace detail {
// Pure second difference along one axis (component of the Laplacian).
inline Field second_difference(const Field& f, int axis) {
    const Grid& g = f.grid;
    Field out = make_field(g);
    const int nx = g.points[0];
    const int ny = g.dim == 2 ? g.points[1] : 1;
    const int n = g.points[axis];
    const double ih2 = 1.0 / (g.spacing(axis) * g.spacing(axis));
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const int i = axis == 0 ? ix : iy;
            const int m = reflect(i - 1, n);
            const int p = reflect(i + 1, n);
            const std::size_t km = axis == 0 ? g.index(m, iy) : g.index(ix, m);
            const std::size_t kp = axis == 0 ? g.index(p, iy) : g.index(ix, p);
            const std::size_t k = g.index(ix, iy);
            out.values[k] = (f.values[km] - 2.0 * f.values[k] + f.values[kp]) * ih2;
        }
    }
    return out;
}

// Mixed second difference d^2 f / dx dy (2D only), centered with mirroring.
inline Field cross_difference(const Field& f) {
    const Grid& g = f.grid;
    Field out = make_field(g);
    const int nx = g.points[0];
    const int ny = g.points[1];
    const double c = 1.0 / (4.0 * g.spacing(0) * g.spacing(1));
    for (int iy = 0; iy < ny; ++iy) {
        const int d = reflect(iy - 1, ny);
        const int u = reflect(iy + 1, ny);
        for (int ix = 0; ix < nx; ++ix) {
            const int l = reflect(ix - 1, nx);
            const int r = reflect(ix + 1, nx);
            out.values[g.index(ix, iy)] =
                (f.values[g.index(r, u)] - f.values[g.index(l, u)] -
                 f.values[g.index(r, d)] + f.values[g.index(l, d)]) * c;
        }
    }
    return out;
}
} // namespace detail

// Frobenius norm squared of the nodal Hessian: sum of squared second
// derivatives including both mixed terms. In 1D this is just (f'')^2.
inline Field hessian_norm_squared(const Field& f) {
    Field fxx = detail::second_difference(f, 0);
    Field out = make_field(f.grid);
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = fxx.values[i] * fxx.values[i];
    if (f.grid.dim == 2) {
        Field fyy = detail::second_difference(f, 1);
        Field fxy = detail::cross_difference(f);
        for (std::size_t i = 0; i < out.size(); ++i)
            out.values[i] += fyy.values[i] * fyy.values[i] + 2.0 * fxy.values[i] * fxy.values[i];
    }
    return out;
}

// Nodal quadratic form grad(s)^T Hess(q) grad(s), used by the
// integration-by-parts checks.
inline Field hessian_bilinear(const Field& q, const Field& s) {
    Field qxx = detail::second_difference(q, 0);
    Field sx = gradient_component(s, 0);
    Field out = make_field(q.grid);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.values[i] = qxx.values[i] * sx.values[i] * sx.values[i];
    if (q.grid.dim == 2) {
        Field qyy = detail::second_difference(q, 1);
        Field qxy = detail::cross_difference(q);
        Field sy = gradient_component(s, 1);
        for (std::size_t i = 0; i < out.size(); ++i)
            out.values[i] += qyy.values[i] * sy.values[i] * sy.values[i] +
                             2.0 * qxy.values[i] * sx.values[i] * sy.values[i];
    }
    return out;
}

// Nodal power u^s. Exponents below one require every node to clear the
// positivity floor; failing nodes raise rather than clamp.
inline Field power_field(const Field& f, double s) {
    Field out = make_field(f.grid);
    if (s == 1.0) { out.values = f.values; return out; }
    const bool needs_positive = s < 1.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double v = f.values[i];
        if (needs_positive && !(v > positivity_floor)) {
            throw PositivityError("power_field: node " + std::to_string(i) + " value " +
                                  std::to_string(v) + " below positivity floor for exponent " +
                                  std::to_string(s));
        }
        out.values[i] = std::pow(v, s);
    }
    return out;
}

inline Field log_field(const Field& f) {
    Field out = make_field(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double v = f.values[i];
        if (!(v > positivity_floor))
            throw PositivityError("log_field: node value below positivity floor");
        out.values[i] = std::log(v);
    }
    return out;
}

inline double min_value(const Field& f) {
    double m = f.values.empty() ? 0.0 : f.values[0];
    for (double v : f.values) m = std::min(m, v);
    return m;
}

inline double max_abs(const Field& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

} // namespace ineqlab

#endif
