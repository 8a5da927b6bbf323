#include "geotomo/scalar_field.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace geotomo {

ScalarField ScalarField::zero() { return constant(0.0); }

ScalarField ScalarField::constant(double c) {
    ScalarField s;
    s.f = [c](double, double) { return c; };
    auto z = [](double, double) { return 0.0; };
    s.fx = s.fy = s.fxx = s.fxy = s.fyy = z;
    s.analytic = true;
    return s;
}

ScalarField ScalarField::from_expression(const Expression& e) {
    // Differentiate once per direction up front; evaluation then shares the
    // simplified ASTs.
    auto ex = std::make_shared<Expression>(e);
    auto dx = std::make_shared<Expression>(e.derivative(0));
    auto dy = std::make_shared<Expression>(e.derivative(1));
    auto dxx = std::make_shared<Expression>(dx->derivative(0));
    auto dxy = std::make_shared<Expression>(dx->derivative(1));
    auto dyy = std::make_shared<Expression>(dy->derivative(1));
    ScalarField s;
    s.f = [ex](double x, double y) { return ex->eval(x, y); };
    s.fx = [dx](double x, double y) { return dx->eval(x, y); };
    s.fy = [dy](double x, double y) { return dy->eval(x, y); };
    s.fxx = [dxx](double x, double y) { return dxx->eval(x, y); };
    s.fxy = [dxy](double x, double y) { return dxy->eval(x, y); };
    s.fyy = [dyy](double x, double y) { return dyy->eval(x, y); };
    s.analytic = true;
    return s;
}

namespace {

// Cubic convolution kernel (Keys, a = -1/2) and its derivative.
double keys_w(double t) {
    t = std::abs(t);
    if (t < 1.0) return 1.0 + t * t * (-2.5 + 1.5 * t);
    if (t < 2.0) return 2.0 + t * (-4.0 + t * (2.5 - 0.5 * t));
    return 0.0;
}
double keys_dw(double t) {
    double s = t < 0.0 ? -1.0 : 1.0;
    t = std::abs(t);
    if (t < 1.0) return s * t * (-5.0 + 4.5 * t);
    if (t < 2.0) return s * (-4.0 + t * (5.0 - 1.5 * t));
    return 0.0;
}

struct GridData {
    std::vector<double> v;
    int nx = 0, ny = 0;
    double hw = 1.0, hx = 0.0, hy = 0.0;
    int order = 3;

    double at(int i, int j) const {
        i = std::clamp(i, 0, nx - 1);
        j = std::clamp(j, 0, ny - 1);
        return v[std::size_t(j) * nx + i];
    }

    // kind: 0 value, 1 d/dx, 2 d/dy
    double sample(double x, double y, int kind) const {
        double u = (x + hw) / hx;
        double w = (y + hw) / hy;
        if (order <= 1) {
            int i = std::clamp(int(std::floor(u)), 0, nx - 2);
            int j = std::clamp(int(std::floor(w)), 0, ny - 2);
            double a = u - i, b = w - j;
            double f00 = at(i, j), f10 = at(i + 1, j), f01 = at(i, j + 1), f11 = at(i + 1, j + 1);
            switch (kind) {
                case 0:
                    return f00 * (1 - a) * (1 - b) + f10 * a * (1 - b) + f01 * (1 - a) * b +
                           f11 * a * b;
                case 1: return ((f10 - f00) * (1 - b) + (f11 - f01) * b) / hx;
                default: return ((f01 - f00) * (1 - a) + (f11 - f10) * a) / hy;
            }
        }
        int i = std::clamp(int(std::floor(u)), 0, nx - 2);
        int j = std::clamp(int(std::floor(w)), 0, ny - 2);
        double a = u - i, b = w - j;
        double acc = 0.0;
        for (int dj = -1; dj <= 2; ++dj) {
            double wy = kind == 2 ? keys_dw(b - dj) / hy : keys_w(b - dj);
            if (wy == 0.0) continue;
            for (int di = -1; di <= 2; ++di) {
                double wx = kind == 1 ? keys_dw(a - di) / hx : keys_w(a - di);
                if (wx == 0.0) continue;
                acc += at(i + di, j + dj) * wx * wy;
            }
        }
        return acc;
    }
};

}  // namespace

ScalarField ScalarField::from_grid(std::vector<double> values, int nx, int ny, double half_width,
                                   int order) {
    if (nx < 2 || ny < 2 || int(values.size()) != nx * ny)
        throw ShapeError("grid field: bad dimensions");
    auto g = std::make_shared<GridData>();
    g->v = std::move(values);
    g->nx = nx;
    g->ny = ny;
    g->hw = half_width;
    g->hx = 2.0 * half_width / (nx - 1);
    g->hy = 2.0 * half_width / (ny - 1);
    g->order = order;

    ScalarField s;
    s.f = [g](double x, double y) { return g->sample(x, y, 0); };
    s.fx = [g](double x, double y) { return g->sample(x, y, 1); };
    s.fy = [g](double x, double y) { return g->sample(x, y, 2); };
    // Second derivatives of the interpolant by short centered differences of
    // the first derivatives; adequate for grid-supplied conformal factors.
    double eps = 0.25 * std::min(g->hx, g->hy);
    s.fxx = [g, eps](double x, double y) {
        return (g->sample(x + eps, y, 1) - g->sample(x - eps, y, 1)) / (2 * eps);
    };
    s.fyy = [g, eps](double x, double y) {
        return (g->sample(x, y + eps, 2) - g->sample(x, y - eps, 2)) / (2 * eps);
    };
    s.fxy = [g, eps](double x, double y) {
        return (g->sample(x + eps, y, 2) - g->sample(x - eps, y, 2)) / (2 * eps);
    };
    s.analytic = false;
    return s;
}

ScalarField ScalarField::from_grid_file(const std::string& path, int order) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open grid file: " + path);
    int nx = 0, ny = 0;
    double hw = 0.0;
    in >> nx >> ny >> hw;
    if (!in || nx < 2 || ny < 2 || hw <= 0.0)
        throw ConfigError("grid file header must be 'nx ny half_width': " + path);
    std::vector<double> vals(std::size_t(nx) * ny);
    for (auto& v : vals) {
        in >> v;
        if (!in) throw ConfigError("grid file truncated: " + path);
    }
    return from_grid(std::move(vals), nx, ny, hw, order);
}

}  // namespace geotomo
