#pragma once

#include <memory>
#include <vector>

#include "geotomo/util.hpp"

namespace geotomo {

// Uniform n x n node grid on the square [-half_width, half_width]^2 with the
// working disk |x| <= r0 embedded. Quadrature weights are exact areas of the
// intersection of each node's cell with the disk, so masked sums integrate
// smooth functions at second order.
class Grid {
  public:
    Grid(int n, double half_width, double r0);

    int n() const { return n_; }
    double h() const { return h_; }
    double half_width() const { return half_width_; }
    double r0() const { return r0_; }
    std::size_t nodes() const { return std::size_t(n_) * n_; }

    double x(int i) const { return -half_width_ + i * h_; }
    double y(int j) const { return -half_width_ + j * h_; }
    std::size_t idx(int i, int j) const { return std::size_t(j) * n_ + i; }

    bool inside(int i, int j) const { return inside_[idx(i, j)]; }
    bool inside(std::size_t k) const { return inside_[k]; }
    const std::vector<double>& weights() const { return weight_; }
    double weight(std::size_t k) const { return weight_[k]; }
    const std::vector<std::size_t>& inside_nodes() const { return inside_nodes_; }

    // Area of the disk r <= R intersected with [x0,x1]x[y0,y1].
    static double disk_cell_overlap(double R, double x0, double x1, double y0, double y1);

  private:
    int n_;
    double half_width_, r0_, h_;
    std::vector<bool> inside_;          // node strictly inside the closed disk
    std::vector<double> weight_;        // cell-overlap area (zero well outside)
    std::vector<std::size_t> inside_nodes_;
};

using GridPtr = std::shared_ptr<const Grid>;

// Which nodes of a field carry valid values.
enum class Support : std::uint8_t {
    Ambient,  // every node of the square
    Disk,     // only nodes inside the disk
};

// d/dx and d/dy of a complex node field, centered where both neighbours are
// valid and one-sided (second order) otherwise. Nodes with no usable stencil
// get zero.
void differentiate_x(const Grid& g, Support sup, const cplx* in, cplx* out);
void differentiate_y(const Grid& g, Support sup, const cplx* in, cplx* out);

}  // namespace geotomo
