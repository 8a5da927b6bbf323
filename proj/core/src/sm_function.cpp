#include "geotomo/sm_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace geotomo {

SmFunction::SmFunction(GridPtr grid, int band, Support support, Parity parity, bool real)
    : grid_(std::move(grid)), band_(band), support_(support), parity_(parity), real_(real) {
    if (band < 0) throw ShapeError("negative band");
    modes_.assign(std::size_t(2 * band + 1) * grid_->nodes(), cplx(0.0, 0.0));
}

SmFunction SmFunction::zeros(GridPtr grid, int band, Support s, Parity p, bool real) {
    return SmFunction(std::move(grid), band, s, p, real);
}

cplx SmFunction::value_at_node(int i, int j, double theta) const {
    std::size_t node = grid_->idx(i, j);
    cplx w = std::polar(1.0, theta);
    cplx acc = at(0, node);
    cplx wp = w, wm = std::conj(w);
    for (int k = 1; k <= band_; ++k) {
        acc += at(k, node) * wp + at(-k, node) * wm;
        wp *= w;
        wm *= std::conj(w);
    }
    return acc;
}

SmFunction SmFunction::fourier_project(int k) const {
    SmFunction out(grid_, std::abs(k), support_, std::abs(k) % 2 == 0 ? Parity::Even : Parity::Odd,
                   false);
    if (k >= -band_ && k <= band_) {
        std::copy(mode(k), mode(k) + grid_->nodes(), out.mode(k));
    }
    return out;
}

SmFunction SmFunction::hilbert_transform() const {
    SmFunction out = *this;
    for (int k = -band_; k <= band_; ++k) {
        if (k == 0) {
            std::fill(out.mode(0), out.mode(0) + grid_->nodes(), cplx(0.0));
            continue;
        }
        cplx factor(0.0, k > 0 ? -1.0 : 1.0);
        cplx* p = out.mode(k);
        for (std::size_t s = 0; s < grid_->nodes(); ++s) p[s] *= factor;
    }
    // -i sgn(k) commutes with conjugate symmetry, so realness survives
    return out;
}

SmFunction SmFunction::even_part() const {
    SmFunction out = *this;
    for (int k = -band_; k <= band_; ++k)
        if (k % 2 != 0) std::fill(out.mode(k), out.mode(k) + grid_->nodes(), cplx(0.0));
    out.parity_ = Parity::Even;
    return out;
}

SmFunction SmFunction::odd_part() const {
    SmFunction out = *this;
    for (int k = -band_; k <= band_; ++k)
        if (k % 2 == 0) std::fill(out.mode(k), out.mode(k) + grid_->nodes(), cplx(0.0));
    out.parity_ = Parity::Odd;
    return out;
}

// (Id + iH): keeps positive modes doubled, zeroes negative, keeps mode 0.
// Output is holomorphic.
SmFunction SmFunction::holomorphic_filter() const {
    SmFunction out = *this;
    for (int k = -band_; k <= band_; ++k) {
        cplx* p = out.mode(k);
        if (k < 0)
            std::fill(p, p + grid_->nodes(), cplx(0.0));
        else if (k > 0)
            for (std::size_t s = 0; s < grid_->nodes(); ++s) p[s] *= 2.0;
    }
    out.real_ = false;
    out.parity_ = Parity::Mixed;
    return out;
}

// (Id - iH): antiholomorphic counterpart.
SmFunction SmFunction::antiholomorphic_filter() const {
    SmFunction out = *this;
    for (int k = -band_; k <= band_; ++k) {
        cplx* p = out.mode(k);
        if (k > 0)
            std::fill(p, p + grid_->nodes(), cplx(0.0));
        else if (k < 0)
            for (std::size_t s = 0; s < grid_->nodes(); ++s) p[s] *= 2.0;
    }
    out.real_ = false;
    out.parity_ = Parity::Mixed;
    return out;
}

SmFunction SmFunction::with_band(int new_band) const {
    SmFunction out(grid_, new_band, support_, parity_, real_);
    int kmax = std::min(band_, new_band);
    for (int k = -kmax; k <= kmax; ++k)
        std::copy(mode(k), mode(k) + grid_->nodes(), out.mode(k));
    if (new_band < band_) {
        for (int k = new_band + 1; k <= band_; ++k) {
            for (std::size_t s = 0; s < grid_->nodes(); ++s) {
                if (std::abs(at(k, s)) > 1e-9 || std::abs(at(-k, s)) > 1e-9)
                    throw BandOverflowError("with_band would discard non-negligible modes");
            }
        }
    }
    return out;
}

SmFunction SmFunction::conjugated() const {
    SmFunction out(grid_, band_, support_, parity_, real_);
    for (int k = -band_; k <= band_; ++k) {
        const cplx* src = mode(-k);
        cplx* dst = out.mode(k);
        for (std::size_t s = 0; s < grid_->nodes(); ++s) dst[s] = std::conj(src[s]);
    }
    return out;
}

SmFunction& SmFunction::operator+=(const SmFunction& o) {
    if (grid_.get() != o.grid_.get()) throw ShapeError("grid mismatch in +");
    if (o.band_ > band_) *this = with_band(o.band_);
    for (int k = -o.band_; k <= o.band_; ++k) {
        cplx* d = mode(k);
        const cplx* s = o.mode(k);
        for (std::size_t i = 0; i < grid_->nodes(); ++i) d[i] += s[i];
    }
    real_ = real_ && o.real_;
    if (parity_ != o.parity_) parity_ = Parity::Mixed;
    if (support_ != o.support_) support_ = Support::Disk;
    return *this;
}

SmFunction& SmFunction::operator-=(const SmFunction& o) {
    SmFunction neg = o;
    neg *= cplx(-1.0, 0.0);
    return *this += neg;
}

SmFunction& SmFunction::operator*=(cplx c) {
    for (auto& v : modes_) v *= c;
    if (c.imag() != 0.0) real_ = false;
    return *this;
}

void SmFunction::symmetrize_real() {
    for (int k = 0; k <= band_; ++k) {
        cplx* pk = mode(k);
        cplx* mk = mode(-k);
        for (std::size_t s = 0; s < grid_->nodes(); ++s) {
            cplx avg = 0.5 * (pk[s] + std::conj(mk[s]));
            pk[s] = avg;
            mk[s] = std::conj(avg);
        }
    }
    real_ = true;
}

void SmFunction::enforce_parity(Parity p) {
    if (p == Parity::Mixed) {
        parity_ = p;
        return;
    }
    int want = p == Parity::Even ? 0 : 1;
    for (int k = -band_; k <= band_; ++k)
        if (((k % 2) + 2) % 2 != want) std::fill(mode(k), mode(k) + grid_->nodes(), cplx(0.0));
    parity_ = p;
}

double SmFunction::max_abs() const {
    double m = 0.0;
    for (const auto& v : modes_) m = std::max(m, std::abs(v));
    return m;
}

SmFunction SmFunction::from_mode_fields(GridPtr grid, int band,
                                        const std::function<cplx(int, double, double)>& mode_fn,
                                        Support s, Parity p, bool real) {
    SmFunction out(grid, band, s, p, real);
    const Grid& g = *grid;
    for (int k = -band; k <= band; ++k) {
        if (p == Parity::Even && ((k % 2) != 0)) continue;
        if (p == Parity::Odd && ((k % 2) == 0)) continue;
        cplx* dst = out.mode(k);
        for (int j = 0; j < g.n(); ++j)
            for (int i = 0; i < g.n(); ++i) {
                std::size_t node = g.idx(i, j);
                if (s == Support::Disk && !g.inside(node)) continue;
                dst[node] = mode_fn(k, g.x(i), g.y(j));
            }
    }
    if (real) out.symmetrize_real();
    return out;
}

SmFunction SmFunction::from_theta_samples(GridPtr grid, int n_theta,
                                          const std::vector<cplx>& values, Support s) {
    const Grid& g = *grid;
    if (values.size() != g.nodes() * std::size_t(n_theta))
        throw ShapeError("theta sample array has wrong size");
    int band = n_theta / 2 - 2;  // drop the top bins; leaves headroom for one X
    SmFunction out(grid, band, s, Parity::Mixed, false);

    std::vector<cplx> twiddle(n_theta);
    for (int l = 0; l < n_theta; ++l) twiddle[l] = std::polar(1.0, -kTwoPi * l / n_theta);

    for (std::size_t node = 0; node < g.nodes(); ++node) {
        if (s == Support::Disk && !g.inside(node)) continue;
        const cplx* v = values.data() + node * n_theta;
        for (int k = -band; k <= band; ++k) {
            cplx acc = 0.0;
            for (int l = 0; l < n_theta; ++l) {
                int p = (int(std::int64_t(k) * l) % n_theta + n_theta) % n_theta;
                acc += v[l] * twiddle[p];
            }
            out.at(k, node) = acc / double(n_theta);
        }
    }
    return out;
}

cplx SmSampler::operator()(double x, double y, double theta) const {
    const Grid& g = u->grid();
    double fx = (x + g.half_width()) / g.h();
    double fy = (y + g.half_width()) / g.h();
    int i = std::clamp(int(std::floor(fx)), 0, g.n() - 2);
    int j = std::clamp(int(std::floor(fy)), 0, g.n() - 2);
    double a = fx - i, b = fy - j;

    std::size_t n00 = g.idx(i, j), n10 = g.idx(i + 1, j), n01 = g.idx(i, j + 1),
                n11 = g.idx(i + 1, j + 1);
    double w00 = (1 - a) * (1 - b), w10 = a * (1 - b), w01 = (1 - a) * b, w11 = a * b;

    if (u->support() == Support::Disk) {
        // average over the valid corners only
        double tot = 0.0;
        w00 *= g.inside(n00) ? 1.0 : 0.0;
        w10 *= g.inside(n10) ? 1.0 : 0.0;
        w01 *= g.inside(n01) ? 1.0 : 0.0;
        w11 *= g.inside(n11) ? 1.0 : 0.0;
        tot = w00 + w10 + w01 + w11;
        if (tot <= 0.0) return 0.0;
        w00 /= tot;
        w10 /= tot;
        w01 /= tot;
        w11 /= tot;
    }

    cplx w = std::polar(1.0, theta);
    cplx wp = w, wm = std::conj(w);
    auto interp = [&](int k) {
        return w00 * u->at(k, n00) + w10 * u->at(k, n10) + w01 * u->at(k, n01) +
               w11 * u->at(k, n11);
    };
    cplx acc = interp(0);
    for (int k = 1; k <= u->band(); ++k) {
        acc += interp(k) * wp + interp(-k) * wm;
        wp *= w;
        wm *= std::conj(w);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Serialization: "GTSM" header + raw complex doubles.

namespace {
struct BlobHeader {
    char magic[4];
    std::uint32_t version;
    std::int32_t n, n_y, n_theta, band;
    std::uint8_t support, parity, real, pad;
    std::uint32_t pad2;
    double half_width, r0;
    std::uint64_t timestamp;
};
}  // namespace

void SmFunction::save_blob(const std::string& path, bool with_timestamp) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for write: " + path);
    BlobHeader h{};
    std::memcpy(h.magic, "GTSM", 4);
    h.version = 1;
    h.n = grid_->n();
    h.n_y = grid_->n();
    h.n_theta = 2 * (band_ + 2);  // smallest fiber grid that resolves the band
    h.band = band_;
    h.support = std::uint8_t(support_);
    h.parity = std::uint8_t(parity_);
    h.real = real_ ? 1 : 0;
    h.half_width = grid_->half_width();
    h.r0 = grid_->r0();
    h.timestamp = with_timestamp ? std::uint64_t(std::time(nullptr)) : 0;
    out.write(reinterpret_cast<const char*>(&h), sizeof h);
    out.write(reinterpret_cast<const char*>(modes_.data()),
              std::streamsize(modes_.size() * sizeof(cplx)));
    if (!out) throw Error("short write: " + path);
}

SmFunction SmFunction::load_blob(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path);
    BlobHeader h{};
    in.read(reinterpret_cast<char*>(&h), sizeof h);
    if (!in || std::memcmp(h.magic, "GTSM", 4) != 0) throw Error("not an SM blob: " + path);
    auto grid = std::make_shared<Grid>(h.n, h.half_width, h.r0);
    SmFunction u(grid, h.band, Support(h.support), Parity(h.parity), h.real != 0);
    in.read(reinterpret_cast<char*>(u.modes_.data()),
            std::streamsize(u.modes_.size() * sizeof(cplx)));
    if (!in) throw Error("truncated SM blob: " + path);
    return u;
}

void SmFunction::export_mode_csv(const std::string& path, int k) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for write: " + path);
    out << "x,y,re,im\n";
    char buf[128];
    const Grid& g = *grid_;
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i) {
            cplx v = at(k, g.idx(i, j));
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", g.x(i), g.y(j), v.real(),
                          v.imag());
            out << buf;
        }
}

}  // namespace geotomo
