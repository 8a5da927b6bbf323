#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "geotomo/expression.hpp"
#include "geotomo/util.hpp"

namespace geotomo {

// Real scalar field on the computational square with first and second
// derivatives. Derivatives are analytic when the field comes from a closed
// form; grid-backed fields differentiate the interpolant.
struct ScalarField {
    std::function<double(double, double)> f;
    std::function<double(double, double)> fx, fy;
    std::function<double(double, double)> fxx, fxy, fyy;
    bool analytic = false;

    double operator()(double x, double y) const { return f(x, y); }

    static ScalarField zero();
    static ScalarField constant(double c);
    static ScalarField from_expression(const Expression& e);

    // Values on a uniform (2n+1)^2 grid over [-half_width, half_width]^2,
    // row-major with y varying slowest. order: 1 bilinear, 3 bicubic.
    static ScalarField from_grid(std::vector<double> values, int nx, int ny, double half_width,
                                 int order);

    static ScalarField from_grid_file(const std::string& path, int order);
};

// Complex scalar field as a (re, im) pair; used for connection components.
struct ComplexField {
    ScalarField re, im;

    cplx value(double x, double y) const { return {re(x, y), im(x, y)}; }
    cplx dx(double x, double y) const { return {re.fx(x, y), im.fx(x, y)}; }
    cplx dy(double x, double y) const { return {re.fy(x, y), im.fy(x, y)}; }

    static ComplexField zero() { return {ScalarField::zero(), ScalarField::zero()}; }
    static ComplexField purely_imaginary(ScalarField im_part) {
        return {ScalarField::zero(), std::move(im_part)};
    }
};

}  // namespace geotomo
