#include "geotomo/ray_transform.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace geotomo {

namespace {

template <typename F>
RayData forward_impl(const IsothermalSurface& surface, F&& f, const FanBeamGrid& grid, int jobs,
                     int degree, double ht) {
    RayData out{grid, std::vector<cplx>(grid.size(), cplx(0.0)), degree};
    GeodesicTracer tracer(surface, ht);
    parallel_for(
        std::int64_t(grid.size()),
        [&](std::int64_t lo, std::int64_t hi, int) {
            for (std::int64_t s = lo; s < hi; ++s) {
                PhaseState ps = grid.sample_state(std::size_t(s));
                cplx integral = 0.0;
                tracer.integrate(ps.x, ps.y, ps.theta, f, integral);
                out.values[std::size_t(s)] = integral;
            }
        },
        jobs);
    return out;
}

}  // namespace

RayData forward_transform(const IsothermalSurface& surface, const SmFunction& f,
                          const FanBeamGrid& grid, int jobs, double ht) {
    SmSampler sampler{&f};
    return forward_impl(surface, sampler, grid, jobs, f.band(), ht);
}

RayData forward_transform(const IsothermalSurface& surface,
                          const std::function<cplx(double, double, double)>& f,
                          const FanBeamGrid& grid, int jobs, double ht) {
    return forward_impl(surface, f, grid, jobs, 0, ht);
}

namespace {

template <typename F>
SmFunction transport_impl(const IsothermalSurface& surface, F&& f, int jobs) {
    const Grid& g = surface.grid();
    const int nt = surface.n_theta();
    const auto& nodes = g.inside_nodes();
    std::vector<cplx> vals(g.nodes() * std::size_t(nt), cplx(0.0));
    GeodesicTracer tracer(surface);
    parallel_for(
        std::int64_t(nodes.size()),
        [&](std::int64_t lo, std::int64_t hi, int) {
            for (std::int64_t r = lo; r < hi; ++r) {
                std::size_t node = nodes[r];
                int i = int(node % g.n());
                int j = int(node / g.n());
                double x = g.x(i), y = g.y(j);
                for (int l = 0; l < nt; ++l) {
                    cplx integral = 0.0;
                    tracer.integrate(x, y, kTwoPi * l / nt, f, integral);
                    vals[node * nt + l] = integral;
                }
            }
        },
        jobs);
    return SmFunction::from_theta_samples(surface.grid_ptr(), nt, vals, Support::Disk);
}

}  // namespace

SmFunction transport_solve(const IsothermalSurface& surface, const SmFunction& f, int jobs) {
    SmSampler sampler{&f};
    return transport_impl(surface, sampler, jobs);
}

SmFunction transport_solve(const IsothermalSurface& surface,
                           const std::function<cplx(double, double, double)>& f, int jobs) {
    return transport_impl(surface, f, jobs);
}

SmFunction backprojection_i0star(const InfluxMap& map, const RayData& data) {
    return map.backproject(data.values);
}

double influx_weight(const IsothermalSurface& surface, const FanBeamGrid& grid, std::size_t s) {
    int ia = int(s % grid.n_alpha());
    int ib = int(s / grid.n_alpha());
    double b = grid.beta(ib);
    double x = grid.r0() * std::cos(b), y = grid.r0() * std::sin(b);
    return grid.weight(s) * std::cos(grid.alpha(ia)) * std::exp(surface.lambda(x, y)) * grid.r0();
}

cplx influx_inner_product(const IsothermalSurface& surface, const FanBeamGrid& grid,
                          const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != grid.size() || b.size() != grid.size())
        throw ShapeError("influx data size mismatch");
    cplx acc = 0.0;
    for (std::size_t s = 0; s < grid.size(); ++s)
        acc += influx_weight(surface, grid, s) * a[s] * std::conj(b[s]);
    return acc;
}

// ---------------------------------------------------------------------------

void RayData::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for write: " + path);
    out << "beta,alpha,re,im\n";
    char buf[128];
    for (int ib = 0; ib < grid.n_beta(); ++ib)
        for (int ia = 0; ia < grid.n_alpha(); ++ia) {
            cplx v = values[grid.index(ib, ia)];
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", grid.beta(ib),
                          grid.alpha(ia), v.real(), v.imag());
            out << buf;
        }
}

namespace {
struct FanHeader {
    char magic[4];
    std::uint32_t version;
    std::int32_t n_beta, n_alpha, degree, pad;
    double r0;
    std::uint64_t timestamp;
};
}  // namespace

void RayData::save_blob(const std::string& path, bool with_timestamp) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for write: " + path);
    FanHeader h{};
    std::memcpy(h.magic, "GTFB", 4);
    h.version = 1;
    h.n_beta = grid.n_beta();
    h.n_alpha = grid.n_alpha();
    h.degree = degree;
    h.r0 = grid.r0();
    h.timestamp = with_timestamp ? std::uint64_t(std::time(nullptr)) : 0;
    out.write(reinterpret_cast<const char*>(&h), sizeof h);
    out.write(reinterpret_cast<const char*>(values.data()),
              std::streamsize(values.size() * sizeof(cplx)));
    if (!out) throw Error("short write: " + path);
}

RayData RayData::load_blob(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path);
    FanHeader h{};
    in.read(reinterpret_cast<char*>(&h), sizeof h);
    if (!in || std::memcmp(h.magic, "GTFB", 4) != 0) throw Error("not a fan-beam blob: " + path);
    RayData d{FanBeamGrid(h.r0, h.n_beta, h.n_alpha),
              std::vector<cplx>(std::size_t(h.n_beta) * h.n_alpha), h.degree};
    in.read(reinterpret_cast<char*>(d.values.data()),
            std::streamsize(d.values.size() * sizeof(cplx)));
    if (!in) throw Error("truncated fan-beam blob: " + path);
    return d;
}

RayData RayData::load_csv(const std::string& path, const FanBeamGrid& grid) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open: " + path);
    std::string line;
    std::getline(in, line);  // header
    RayData d{grid, std::vector<cplx>(grid.size(), cplx(0.0)), 0};
    for (int ib = 0; ib < grid.n_beta(); ++ib)
        for (int ia = 0; ia < grid.n_alpha(); ++ia) {
            if (!std::getline(in, line)) throw Error("sinogram CSV truncated: " + path);
            double b, a, re, im;
            if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &b, &a, &re, &im) != 4)
                throw Error("bad sinogram CSV row: " + line);
            d.values[grid.index(ib, ia)] = cplx(re, im);
        }
    return d;
}

}  // namespace geotomo
