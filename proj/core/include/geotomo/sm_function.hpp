#pragma once

#include <functional>
#include <string>
#include <vector>

#include "geotomo/grid.hpp"
#include "geotomo/util.hpp"

namespace geotomo {

enum class Parity : std::uint8_t { Even, Odd, Mixed };

inline Parity flip(Parity p) {
    if (p == Parity::Even) return Parity::Odd;
    if (p == Parity::Odd) return Parity::Even;
    return Parity::Mixed;
}

// Function on the unit circle bundle, spectral in the fiber angle and nodal in
// space: u(x,y,theta) = sum_{|k| <= band} mode_k(x,y) e^{ik theta}.
class SmFunction {
  public:
    SmFunction() = default;
    SmFunction(GridPtr grid, int band, Support support, Parity parity = Parity::Mixed,
               bool real = false);

    const Grid& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }
    int band() const { return band_; }
    Support support() const { return support_; }
    Parity parity() const { return parity_; }
    bool is_real() const { return real_; }

    void set_parity(Parity p) { parity_ = p; }
    void set_real(bool r) { real_ = r; }

    cplx* mode(int k) { return modes_.data() + plane(k); }
    const cplx* mode(int k) const { return modes_.data() + plane(k); }
    cplx& at(int k, std::size_t node) { return modes_[plane(k) + node]; }
    cplx at(int k, std::size_t node) const { return modes_[plane(k) + node]; }

    // value at grid node (i,j) and fiber angle theta
    cplx value_at_node(int i, int j, double theta) const;

    SmFunction fourier_project(int k) const;       // single mode, idempotent
    SmFunction hilbert_transform() const;          // mode k -> -i sgn(k) mode k
    SmFunction even_part() const;
    SmFunction odd_part() const;
    SmFunction holomorphic_filter() const;         // (Id + iH): u0 + 2 sum_{k>0} u_k
    SmFunction antiholomorphic_filter() const;     // (Id - iH): u0 + 2 sum_{k<0} u_k
    SmFunction with_band(int new_band) const;      // grow or shrink (shrink checks dropped mass)
    SmFunction conjugated() const;                 // complex conjugate (mode k -> conj(mode -k))

    SmFunction& operator+=(const SmFunction& o);
    SmFunction& operator-=(const SmFunction& o);
    SmFunction& operator*=(cplx c);
    friend SmFunction operator+(SmFunction a, const SmFunction& b) { return a += b; }
    friend SmFunction operator-(SmFunction a, const SmFunction& b) { return a -= b; }
    friend SmFunction operator*(cplx c, SmFunction a) { return a *= c; }

    // Enforce conj(mode_{-k}) == mode_k exactly in storage and set the flag.
    void symmetrize_real();
    // Zero modes of the wrong parity and record the declared parity.
    void enforce_parity(Parity p);

    double max_abs() const;

    void save_blob(const std::string& path, bool with_timestamp = false) const;
    static SmFunction load_blob(const std::string& path);
    void export_mode_csv(const std::string& path, int k) const;

    // builders -------------------------------------------------------------
    static SmFunction zeros(GridPtr grid, int band, Support s, Parity p = Parity::Mixed,
                            bool real = false);

    // Evaluate a closed form per mode on the grid.
    static SmFunction from_mode_fields(GridPtr grid, int band,
                                       const std::function<cplx(int, double, double)>& mode_fn,
                                       Support s, Parity p = Parity::Mixed, bool real = false);

    // DFT of fiber samples; values laid out node-major: values[node * n_theta + l]
    // with theta_l = 2 pi l / n_theta. Modes above n_theta/2 - 2 are discarded.
    static SmFunction from_theta_samples(GridPtr grid, int n_theta,
                                         const std::vector<cplx>& values, Support s);

  private:
    std::size_t plane(int k) const {
        if (k < -band_ || k > band_) throw BandOverflowError("mode index outside stored band");
        return std::size_t(k + band_) * grid_->nodes();
    }

    GridPtr grid_;
    int band_ = 0;
    Support support_ = Support::Ambient;
    Parity parity_ = Parity::Mixed;
    bool real_ = false;
    std::vector<cplx> modes_;
};

// Bilinear sampler at arbitrary (x, y, theta). Disk-supported functions are
// averaged over the valid corners of the containing cell.
struct SmSampler {
    const SmFunction* u;

    cplx operator()(double x, double y, double theta) const;
};

// Smooth radial cutoff with `power` vanishing derivatives at r0; identically
// zero outside the disk.
inline double radial_cutoff(double r, double r0, int power = 3) {
    double s = (r / r0) * (r / r0);
    if (s >= 1.0) return 0.0;
    double base = 1.0 - s;
    double out = 1.0;
    for (int i = 0; i < power; ++i) out *= base;
    return out;
}

}  // namespace geotomo
