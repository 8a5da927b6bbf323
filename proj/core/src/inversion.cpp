#include "geotomo/inversion.hpp"

#include <cmath>

#include "geotomo/identities.hpp"

namespace geotomo {

namespace {

std::vector<int> parity_modes(int degree) {
    std::vector<int> out;
    for (int k = -degree; k <= degree; ++k)
        if ((std::abs(k) % 2) == (degree % 2)) out.push_back(k);
    return out;
}

struct GeoState {
    double x, y, th;
};

GeoState geo_rhs(const IsothermalSurface& s, const GeoState& g) {
    double l = s.lambda(g.x, g.y);
    double e = std::exp(-l);
    double c = std::cos(g.th), sn = std::sin(g.th);
    return {e * c, e * sn, e * (-s.lambda_x(g.x, g.y) * sn + s.lambda_y(g.x, g.y) * c)};
}

GeoState geo_step(const IsothermalSurface& s, const GeoState& y0, double h) {
    GeoState k1 = geo_rhs(s, y0);
    GeoState y1{y0.x + 0.5 * h * k1.x, y0.y + 0.5 * h * k1.y, y0.th + 0.5 * h * k1.th};
    GeoState k2 = geo_rhs(s, y1);
    y1 = {y0.x + 0.5 * h * k2.x, y0.y + 0.5 * h * k2.y, y0.th + 0.5 * h * k2.th};
    GeoState k3 = geo_rhs(s, y1);
    y1 = {y0.x + h * k3.x, y0.y + h * k3.y, y0.th + h * k3.th};
    GeoState k4 = geo_rhs(s, y1);
    return {y0.x + (h / 6) * (k1.x + 2 * (k2.x + k3.x) + k4.x),
            y0.y + (h / 6) * (k1.y + 2 * (k2.y + k3.y) + k4.y),
            y0.th + (h / 6) * (k1.th + 2 * (k2.th + k3.th) + k4.th)};
}

// Walk the ray and emit composite-Simpson samples (state, weight) per step.
template <typename Emit>
void trace_simpson(const IsothermalSurface& s, double ht, double x, double y, double th,
                   Emit&& emit) {
    const double r2 = s.r0() * s.r0() * (1.0 + 1e-14);
    auto outside = [&](const GeoState& g) { return g.x * g.x + g.y * g.y > r2; };
    GeoState cur{x, y, th};
    if (outside(cur)) return;
    double t = 0.0;
    for (;;) {
        GeoState nxt = geo_step(s, cur, ht);
        double h = ht;
        bool last = false;
        if (outside(nxt)) {
            double lo = 0.0, hi = ht;
            for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
                double mid = 0.5 * (lo + hi);
                (outside(geo_step(s, cur, mid)) ? hi : lo) = mid;
            }
            h = 0.5 * (lo + hi);
            nxt = geo_step(s, cur, h);
            last = true;
        }
        GeoState mid = geo_step(s, cur, 0.5 * h);
        emit(cur, h / 6.0);
        emit(mid, 4.0 * h / 6.0);
        emit(nxt, h / 6.0);
        if (last) return;
        cur = nxt;
        t += h;
        if (t > s.t_max())
            throw NontrappingError("geodesic exceeded T_max; surface may be trapping");
    }
}

}  // namespace

RayBundle::RayBundle(const IsothermalSurface& surface, const FanBeamGrid& grid, int degree,
                     double ht, int jobs)
    : s_(surface), fan_(grid), degree_(degree), modes_(parity_modes(degree)) {
    const Grid& g = surface.grid();
    nodes_ = g.inside_nodes();
    slot_.assign(g.nodes(), -1);
    for (std::size_t t = 0; t < nodes_.size(); ++t) slot_[nodes_[t]] = std::int32_t(t);

    const double step = std::max(ht, surface.ht());
    std::vector<std::vector<Sample>> per_beam(fan_.size());
    parallel_for(
        std::int64_t(fan_.size()),
        [&](std::int64_t lo, std::int64_t hi, int) {
            for (std::int64_t sidx = lo; sidx < hi; ++sidx) {
                auto& list = per_beam[std::size_t(sidx)];
                PhaseState ps = fan_.sample_state(std::size_t(sidx));
                trace_simpson(surface, step, ps.x, ps.y, ps.theta,
                              [&](const GeoState& st, double qw) {
                                  double fx = (st.x + g.half_width()) / g.h();
                                  double fy = (st.y + g.half_width()) / g.h();
                                  int i = std::clamp(int(std::floor(fx)), 0, g.n() - 2);
                                  int j = std::clamp(int(std::floor(fy)), 0, g.n() - 2);
                                  double a = fx - i, b = fy - j;
                                  double w[4] = {(1 - a) * (1 - b), a * (1 - b), (1 - a) * b,
                                                 a * b};
                                  std::size_t nd[4] = {g.idx(i, j), g.idx(i + 1, j),
                                                       g.idx(i, j + 1), g.idx(i + 1, j + 1)};
                                  double tot = 0.0;
                                  for (int q = 0; q < 4; ++q) {
                                      if (slot_[nd[q]] < 0) w[q] = 0.0;
                                      tot += w[q];
                                  }
                                  if (tot <= 0.0) return;
                                  Sample smp;
                                  smp.cell = std::uint32_t(g.idx(i, j));
                                  for (int q = 0; q < 4; ++q) smp.w[q] = float(w[q] / tot);
                                  smp.tc = float(std::cos(st.th));
                                  smp.ts = float(std::sin(st.th));
                                  smp.quad_w = float(qw);
                                  list.push_back(smp);
                              });
            }
        },
        jobs);

    beam_start_.assign(fan_.size() + 1, 0);
    for (std::size_t bm = 0; bm < fan_.size(); ++bm)
        beam_start_[bm + 1] = beam_start_[bm] + per_beam[bm].size();
    samples_.resize(beam_start_.back());
    for (std::size_t bm = 0; bm < fan_.size(); ++bm)
        std::copy(per_beam[bm].begin(), per_beam[bm].end(), samples_.begin() + beam_start_[bm]);
}

void RayBundle::apply(const CplxVec& x, CplxVec& y) const {
    const Grid& g = s_.grid();
    const std::size_t nn = nodes_.size();
    const int n = g.n();
    y.assign(fan_.size(), cplx(0.0));
    parallel_for(std::int64_t(fan_.size()), [&](std::int64_t lo, std::int64_t hi, int) {
        for (std::int64_t bm = lo; bm < hi; ++bm) {
            cplx acc = 0.0;
            const int kmin = modes_.front();
            const int kstep = modes_.size() > 1 ? modes_[1] - modes_[0] : 1;
            for (std::size_t sidx = beam_start_[bm]; sidx < beam_start_[bm + 1]; ++sidx) {
                const Sample& smp = samples_[sidx];
                std::size_t c = smp.cell;
                std::int32_t sl[4] = {slot_[c], slot_[c + 1], slot_[c + n], slot_[c + n + 1]};
                cplx e1(double(smp.tc), double(smp.ts));
                // e^{ik theta} by recurrence from the cached cos/sin
                cplx ek(1.0, 0.0);
                for (int t = 0; t < std::abs(kmin); ++t) ek *= e1;
                if (kmin < 0) ek = std::conj(ek);
                cplx estep(1.0, 0.0);
                for (int t = 0; t < kstep; ++t) estep *= e1;
                cplx sample_val = 0.0;
                for (std::size_t mi = 0; mi < modes_.size(); ++mi) {
                    cplx zk = 0.0;
                    for (int q = 0; q < 4; ++q)
                        if (sl[q] >= 0 && smp.w[q] != 0.0f)
                            zk += double(smp.w[q]) * x[mi * nn + std::size_t(sl[q])];
                    sample_val += zk * ek;
                    ek *= estep;
                }
                acc += double(smp.quad_w) * sample_val;
            }
            y[std::size_t(bm)] = acc;
        }
    });
}

void RayBundle::apply_adjoint(const CplxVec& y, CplxVec& x) const {
    const Grid& g = s_.grid();
    const std::size_t nn = nodes_.size();
    const int n = g.n();
    const int jobs = default_jobs();
    std::vector<CplxVec> partial(jobs, CplxVec(unknowns(), cplx(0.0)));
    parallel_for(
        std::int64_t(fan_.size()),
        [&](std::int64_t lo, std::int64_t hi, int worker) {
            CplxVec& out = partial[worker];
            for (std::int64_t bm = lo; bm < hi; ++bm) {
                cplx v = y[std::size_t(bm)];
                if (v == 0.0) continue;
                const int kmin = modes_.front();
                const int kstep = modes_.size() > 1 ? modes_[1] - modes_[0] : 1;
                for (std::size_t sidx = beam_start_[bm]; sidx < beam_start_[bm + 1]; ++sidx) {
                    const Sample& smp = samples_[sidx];
                    std::size_t c = smp.cell;
                    std::int32_t sl[4] = {slot_[c], slot_[c + 1], slot_[c + n], slot_[c + n + 1]};
                    cplx e1(double(smp.tc), double(smp.ts));
                    cplx ek(1.0, 0.0);
                    for (int t = 0; t < std::abs(kmin); ++t) ek *= e1;
                    if (kmin < 0) ek = std::conj(ek);
                    cplx estep(1.0, 0.0);
                    for (int t = 0; t < kstep; ++t) estep *= e1;
                    cplx base = double(smp.quad_w) * v;
                    for (std::size_t mi = 0; mi < modes_.size(); ++mi) {
                        cplx contrib = base * std::conj(ek);
                        for (int q = 0; q < 4; ++q)
                            if (sl[q] >= 0 && smp.w[q] != 0.0f)
                                out[mi * nn + std::size_t(sl[q])] += double(smp.w[q]) * contrib;
                        ek *= estep;
                    }
                }
            }
        },
        jobs);
    x.assign(unknowns(), cplx(0.0));
    for (int wkr = 0; wkr < jobs; ++wkr)
        for (std::size_t t = 0; t < x.size(); ++t) x[t] += partial[wkr][t];
}

CplxVec RayBundle::pack(const SmFunction& u) const {
    CplxVec x(unknowns(), cplx(0.0));
    for (std::size_t mi = 0; mi < modes_.size(); ++mi) {
        int k = modes_[mi];
        if (std::abs(k) > u.band()) continue;
        for (std::size_t t = 0; t < nodes_.size(); ++t)
            x[mi * nodes_.size() + t] = u.at(k, nodes_[t]);
    }
    return x;
}

SmFunction RayBundle::unpack(const CplxVec& x) const {
    SmFunction u(s_.grid_ptr(), degree_, Support::Disk,
                 degree_ % 2 == 0 ? Parity::Even : Parity::Odd, false);
    for (std::size_t mi = 0; mi < modes_.size(); ++mi) {
        int k = modes_[mi];
        cplx* dst = u.mode(k);
        for (std::size_t t = 0; t < nodes_.size(); ++t) dst[nodes_[t]] = x[mi * nodes_.size() + t];
    }
    return u;
}

// ---------------------------------------------------------------------------

ReconstructionResult reconstruct_solenoidal(const IsothermalSurface& surface, const RayData& data,
                                            int degree, const ReconstructOptions& opt,
                                            const SymmetricTensor* ground_truth,
                                            const RayBundle* bundle) {
    std::unique_ptr<RayBundle> own;
    if (bundle == nullptr) {
        own = std::make_unique<RayBundle>(surface, data.grid, degree, opt.bundle_ht);
        bundle = own.get();
    }

    std::vector<double> sqw(data.grid.size());
    for (std::size_t s = 0; s < data.grid.size(); ++s)
        sqw[s] = std::sqrt(influx_weight(surface, data.grid, s));

    auto apply = [&](const CplxVec& x, CplxVec& y) {
        bundle->apply(x, y);
        for (std::size_t s = 0; s < y.size(); ++s) y[s] *= sqw[s];
    };
    auto apply_t = [&](const CplxVec& yin, CplxVec& x) {
        CplxVec yw(yin.size());
        for (std::size_t s = 0; s < yin.size(); ++s) yw[s] = yin[s] * sqw[s];
        bundle->apply_adjoint(yw, x);
    };

    CplxVec b(data.values.size());
    for (std::size_t s = 0; s < b.size(); ++s) b[s] = data.values[s] * sqw[s];

    double sigma = power_estimate_norm(apply, apply_t, bundle->unknowns(), b.size());
    CglsOptions copt;
    copt.max_iterations = opt.max_iterations;
    copt.tolerance = opt.tolerance;
    copt.regularization = opt.alpha_reg_rel * sigma * sigma;

    CplxVec x(bundle->unknowns(), cplx(0.0));
    CglsResult cg = cgls(apply, apply_t, b, x, copt);

    SmFunction frep = bundle->unpack(x);
    frep.symmetrize_real();
    SymmetricTensor fhat(degree, std::move(frep));

    ReconstructionResult res;
    res.iterations = cg.iterations;
    res.data_misfit = cg.relative_residual;

    if (degree >= 1) {
        CglsOptions dopt;
        dopt.max_iterations = opt.decompose_iterations;
        dopt.tolerance = 1e-9;
        DecompositionResult dec = solenoidal_decompose(surface, fhat, dopt);
        res.solenoidal = std::move(dec.solenoidal);
        res.solenoidal_residual = dec.solenoidal_residual;
    } else {
        res.solenoidal = fhat;
    }
    res.recovered = std::move(fhat);

    if (ground_truth != nullptr) {
        SmFunction diff = res.solenoidal.restriction() - ground_truth->restriction();
        double tn = l2_norm(surface, ground_truth->restriction());
        res.comparison_error = tn > 0.0 ? l2_norm(surface, diff) / tn : l2_norm(surface, diff);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Phantoms

SmFunction random_sm_phantom(const IsothermalSurface& surface, int band, Rng& rng, bool real,
                             Parity parity, double support_factor, int cutoff_power) {
    struct Term {
        double ax, ay;
        cplx c;
    };
    // Coefficients drawn once per mode, in a fixed order.
    std::vector<std::vector<Term>> table(2 * band + 1);
    for (int k = real ? 0 : -band; k <= band; ++k) {
        if (parity == Parity::Even && (std::abs(k) % 2) != 0) continue;
        if (parity == Parity::Odd && (std::abs(k) % 2) != 1) continue;
        auto& terms = table[k + band];
        for (int t = 0; t < 2; ++t) {
            Term tm;
            tm.ax = rng.uniform(-1.5, 1.5);
            tm.ay = rng.uniform(-1.5, 1.5);
            tm.c = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
            terms.push_back(tm);
        }
        if (real && k > 0) {
            auto& mirror = table[-k + band];
            for (const Term& tm : terms) mirror.push_back({-tm.ax, -tm.ay, std::conj(tm.c)});
        }
        if (real && k == 0) {
            // make mode 0 itself real
            for (Term& tm : terms) tm.c = cplx(tm.c.real(), 0.0);
            auto& self = table[band];
            std::vector<Term> extra;
            for (const Term& tm : self) extra.push_back({-tm.ax, -tm.ay, std::conj(tm.c)});
            for (const Term& tm : extra) self.push_back(tm);
            for (Term& tm : self) tm.c *= 0.5;
        }
    }
    double rsup = support_factor * surface.r0();
    auto fn = [table, rsup, cutoff_power, band](int k, double x, double y) -> cplx {
        double r = std::hypot(x, y);
        double chi = radial_cutoff(r, rsup, cutoff_power);
        if (chi == 0.0) return 0.0;
        cplx acc = 0.0;
        for (const auto& tm : table[k + band])
            acc += tm.c * std::polar(1.0, tm.ax * x + tm.ay * y);
        return chi * acc;
    };
    SmFunction u = SmFunction::from_mode_fields(surface.grid_ptr(), band, fn, Support::Ambient,
                                                parity, real);
    return u;
}

SymmetricTensor random_tensor_phantom(const IsothermalSurface& surface, int degree, Rng& rng,
                                      double support_factor, int cutoff_power) {
    SmFunction rep = random_sm_phantom(surface, degree, rng, true,
                                       degree % 2 == 0 ? Parity::Even : Parity::Odd,
                                       support_factor, cutoff_power);
    return SymmetricTensor(degree, std::move(rep));
}

// ---------------------------------------------------------------------------

ProbeReport sinjectivity_probe(const IsothermalSurface& surface, int degree, int n_trials,
                               std::uint64_t seed, const FanBeamGrid& grid,
                               const ReconstructOptions& opt) {
    ProbeReport report;
    RayBundle bundle(surface, grid, degree, opt.bundle_ht);

    for (int trial = 0; trial < n_trials; ++trial) {
        Rng rng(seed + std::uint64_t(trial) * 7919);
        ProbeTrial tr;
        SymmetricTensor f = random_tensor_phantom(surface, degree, rng);

        SymmetricTensor fs = f;
        if (degree >= 1) {
            DecompositionResult dec = solenoidal_decompose(surface, f);
            fs = std::move(dec.solenoidal);
            RayData data_f = forward_transform(surface, f.restriction(), grid, 0, opt.bundle_ht);
            RayData data_fs = forward_transform(surface, fs.restriction(), grid, 0, opt.bundle_ht);
            for (std::size_t s = 0; s < grid.size(); ++s)
                tr.kernel_max = std::max(tr.kernel_max,
                                         std::abs(data_f.values[s] - data_fs.values[s]));
            ReconstructionResult rec =
                reconstruct_solenoidal(surface, data_f, degree, opt, &fs, &bundle);
            tr.recon_error = rec.comparison_error;
        } else {
            RayData data = forward_transform(surface, f.restriction(), grid, 0, opt.bundle_ht);
            ReconstructionResult rec =
                reconstruct_solenoidal(surface, data, degree, opt, &fs, &bundle);
            tr.recon_error = rec.comparison_error;
        }
        report.trials.push_back(tr);
        report.worst_recon_error = std::max(report.worst_recon_error, tr.recon_error);
        report.worst_kernel = std::max(report.worst_kernel, tr.kernel_max);
    }

    if (degree >= 1) {
        int n_potential = std::min(2, n_trials);
        // near-zero data settles long before the generic iteration budget
        ReconstructOptions popt = opt;
        popt.max_iterations = std::min(opt.max_iterations, 600);
        for (int trial = 0; trial < n_potential; ++trial) {
            Rng rng(seed + 1000003 + std::uint64_t(trial) * 7919);
            ProbeTrial tr;
            tr.potential_only = true;
            SymmetricTensor h =
                random_tensor_phantom(surface, degree - 1, rng, 0.9, 3);
            SymmetricTensor dh = inner_derivative(surface, h);
            RayData data = forward_transform(surface, dh.restriction(), grid, 0, opt.bundle_ht);
            ReconstructionResult rec =
                reconstruct_solenoidal(surface, data, degree, popt, nullptr, &bundle);
            double dhn = l2_norm(surface, dh.restriction());
            double fsn = l2_norm(surface, rec.solenoidal.restriction());
            tr.potential_norm = dhn > 0.0 ? fsn / dhn : fsn;
            for (const cplx& v : data.values)
                tr.kernel_max = std::max(tr.kernel_max, std::abs(v));
            report.trials.push_back(tr);
            report.worst_potential_norm = std::max(report.worst_potential_norm, tr.potential_norm);
        }
    }
    return report;
}

DegreeReductionReport degree_reduction_check(const IsothermalSurface& surface, int degree,
                                             std::uint64_t seed, int jobs) {
    if (degree < 1) throw DomainError("degree reduction check needs m >= 1");
    Rng rng(seed);
    SymmetricTensor h = random_tensor_phantom(surface, degree - 1, rng, 0.85, 3);
    SymmetricTensor dh = inner_derivative(surface, h);
    SmFunction u = transport_solve(surface, dh.restriction(), jobs);

    DegreeReductionReport rep;
    rep.excess_energy_fraction =
        energy_fraction(surface, u, [&](int k) { return std::abs(k) >= degree; });
    SmFunction sum = u + h.restriction().with_band(u.band());
    double hn = l2_norm(surface, h.restriction());
    rep.h_recovery_error = hn > 0.0 ? l2_norm(surface, sum) / hn : l2_norm(surface, sum);
    return rep;
}

OneSidedReport one_sided_vanishing_check(const IsothermalSurface& surface, int degree,
                                         std::uint64_t seed, int jobs) {
    if (degree < 1) throw DomainError("one-sided check needs m >= 1");
    Rng rng(seed);
    // u interior-supported with modes -(m-1) .. m+1: f = -Xu then has
    // f_k = 0 for k <= -m-1
    int band = degree + 1;
    SmFunction full = random_sm_phantom(surface, band, rng, false, Parity::Mixed, 0.85, 3);
    SmFunction u(surface.grid_ptr(), band, Support::Ambient, Parity::Mixed, false);
    for (int k = -(degree - 1); k <= band; ++k)
        std::copy(full.mode(k), full.mode(k) + surface.grid().nodes(), u.mode(k));

    SmFunction f = apply_frame_field(FrameField::X, surface, u);
    f *= cplx(-1.0, 0.0);
    SmFunction uts = transport_solve(surface, f, jobs);

    OneSidedReport rep;
    rep.forbidden_energy_fraction =
        energy_fraction(surface, uts, [&](int k) { return k <= -degree; });
    SmFunction diff = uts - u.with_band(uts.band());
    double un = l2_norm(surface, u);
    rep.recovery_error = un > 0.0 ? l2_norm(surface, diff) / un : l2_norm(surface, diff);
    return rep;
}

}  // namespace geotomo
