#include "geotomo/grid.hpp"

#include <algorithm>
#include <cmath>

namespace geotomo {

namespace {

// Integral of sqrt(R^2 - t^2) dt, clamped outside [-R, R].
double arc_antiderivative(double t, double R) {
    if (t <= -R) return -kPi * R * R / 4.0;
    if (t >= R) return kPi * R * R / 4.0;
    return 0.5 * (t * std::sqrt(R * R - t * t) + R * R * std::asin(t / R));
}

// Area of the disk intersected with [0,a]x[0,b], a,b >= 0.
double quarter_overlap(double R, double a, double b) {
    if (a <= 0.0 || b <= 0.0) return 0.0;
    a = std::min(a, R);
    if (a <= 0.0) return 0.0;
    if (b >= R) return arc_antiderivative(a, R) - arc_antiderivative(0.0, R);
    double xs = std::sqrt(std::max(R * R - b * b, 0.0));  // where the arc meets height b
    double area = b * std::min(a, xs);
    if (a > xs) area += arc_antiderivative(a, R) - arc_antiderivative(xs, R);
    return area;
}

// Signed quarter-plane area for the inclusion-exclusion corner trick.
double corner_area(double R, double x, double y) {
    double s = 1.0;
    if (x < 0.0) { s = -s; x = -x; }
    if (y < 0.0) { s = -s; y = -y; }
    return s * quarter_overlap(R, x, y);
}

}  // namespace

double Grid::disk_cell_overlap(double R, double x0, double x1, double y0, double y1) {
    return corner_area(R, x1, y1) - corner_area(R, x0, y1) - corner_area(R, x1, y0) +
           corner_area(R, x0, y0);
}

Grid::Grid(int n, double half_width, double r0) : n_(n), half_width_(half_width), r0_(r0) {
    if (n < 8) throw ShapeError("grid too coarse");
    if (r0 <= 0.0 || r0 > half_width) throw DomainError("need 0 < r0 <= half_width");
    h_ = 2.0 * half_width / (n - 1);
    inside_.assign(nodes(), false);
    weight_.assign(nodes(), 0.0);
    for (int j = 0; j < n_; ++j) {
        for (int i = 0; i < n_; ++i) {
            double xc = x(i), yc = y(j);
            std::size_t k = idx(i, j);
            inside_[k] = xc * xc + yc * yc <= r0 * r0 * (1.0 + 1e-14);
            double w = disk_cell_overlap(r0, xc - 0.5 * h_, xc + 0.5 * h_, yc - 0.5 * h_,
                                         yc + 0.5 * h_);
            weight_[k] = w;
            if (inside_[k]) inside_nodes_.push_back(k);
        }
    }
}

namespace {

// One row/column pass. stride selects direction; `valid` gates the stencil.
template <typename ValidFn>
void diff_line(const cplx* in, cplx* out, int n, std::ptrdiff_t stride, double h, ValidFn valid) {
    for (int i = 0; i < n; ++i) {
        if (!valid(i)) {
            out[i * stride] = 0.0;
            continue;
        }
        bool lm = i - 1 >= 0 && valid(i - 1);
        bool lp = i + 1 < n && valid(i + 1);
        if (lm && lp) {
            out[i * stride] = (in[(i + 1) * stride] - in[(i - 1) * stride]) / (2.0 * h);
        } else if (lp && i + 2 < n && valid(i + 2)) {
            out[i * stride] = (-3.0 * in[i * stride] + 4.0 * in[(i + 1) * stride] -
                               in[(i + 2) * stride]) /
                              (2.0 * h);
        } else if (lm && i - 2 >= 0 && valid(i - 2)) {
            out[i * stride] = (3.0 * in[i * stride] - 4.0 * in[(i - 1) * stride] +
                               in[(i - 2) * stride]) /
                              (2.0 * h);
        } else if (lp) {
            out[i * stride] = (in[(i + 1) * stride] - in[i * stride]) / h;
        } else if (lm) {
            out[i * stride] = (in[i * stride] - in[(i - 1) * stride]) / h;
        } else {
            out[i * stride] = 0.0;
        }
    }
}

}  // namespace

void differentiate_x(const Grid& g, Support sup, const cplx* in, cplx* out) {
    const int n = g.n();
    for (int j = 0; j < n; ++j) {
        const cplx* row = in + g.idx(0, j);
        cplx* orow = out + g.idx(0, j);
        if (sup == Support::Ambient) {
            diff_line(row, orow, n, 1, g.h(), [](int) { return true; });
        } else {
            diff_line(row, orow, n, 1, g.h(), [&](int i) { return g.inside(i, j); });
        }
    }
}

void differentiate_y(const Grid& g, Support sup, const cplx* in, cplx* out) {
    const int n = g.n();
    for (int i = 0; i < n; ++i) {
        const cplx* col = in + g.idx(i, 0);
        cplx* ocol = out + g.idx(i, 0);
        if (sup == Support::Ambient) {
            diff_line(col, ocol, n, n, g.h(), [](int) { return true; });
        } else {
            diff_line(col, ocol, n, n, g.h(), [&](int j) { return g.inside(i, j); });
        }
    }
}

}  // namespace geotomo
