#pragma once

#include <functional>
#include <string>

#include "geotomo/geodesic_flow.hpp"
#include "geotomo/sm_function.hpp"
#include "geotomo/surface.hpp"

namespace geotomo {

// Samples of I f on the influx boundary, one value per fan-beam sample.
struct RayData {
    FanBeamGrid grid;
    std::vector<cplx> values;
    int degree = 0;

    void save_csv(const std::string& path) const;
    void save_blob(const std::string& path, bool with_timestamp = false) const;
    static RayData load_blob(const std::string& path);
    // CSV rows must match the export order of the given grid
    static RayData load_csv(const std::string& path, const FanBeamGrid& grid);
};

// I f over the fan-beam grid. The integrand rides in the RK4 system.
// ht = 0 uses the surface default step.
RayData forward_transform(const IsothermalSurface& surface, const SmFunction& f,
                          const FanBeamGrid& grid, int jobs = 0, double ht = 0.0);
RayData forward_transform(const IsothermalSurface& surface,
                          const std::function<cplx(double, double, double)>& f,
                          const FanBeamGrid& grid, int jobs = 0, double ht = 0.0);

// u(x,v) = int_0^tau f(phi_t(x,v)) dt at every inside node and fiber angle.
// Satisfies X u = -f in the interior and u = 0 on the outflow boundary.
SmFunction transport_solve(const IsothermalSurface& surface, const SmFunction& f, int jobs = 0);
SmFunction transport_solve(const IsothermalSurface& surface,
                           const std::function<cplx(double, double, double)>& f, int jobs = 0);

// I_0^* h = int_{S_x} h_psi(x,v) dS_x(v); band-0 disk function.
SmFunction backprojection_i0star(const InfluxMap& map, const RayData& data);

// natural pairing weight on the influx boundary: <-v,nu> dSigma^2 in fan-beam
// coordinates = cos(alpha) e^{lambda} r0 dbeta dalpha
double influx_weight(const IsothermalSurface& surface, const FanBeamGrid& grid, std::size_t s);

// (I_0 f, h) over the influx boundary in the weighted measure
cplx influx_inner_product(const IsothermalSurface& surface, const FanBeamGrid& grid,
                          const std::vector<cplx>& a, const std::vector<cplx>& b);

}  // namespace geotomo
