#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace geotomo {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// ---------------------------------------------------------------------------
// Error hierarchy. The CLI maps these onto process exit codes.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Point or parameter outside the admissible domain.
struct DomainError : Error {
    using Error::Error;
};

// Incompatible grids / array shapes.
struct ShapeError : Error {
    using Error::Error;
};

// A fiber-frequency shift would exceed the representable band.
struct BandOverflowError : Error {
    using Error::Error;
};

// Solver or quadrature failure; carries the residual that was reached.
struct NumericError : Error {
    double residual = 0.0;
    NumericError(const std::string& msg, double res)
        : Error(msg + " (residual " + std::to_string(res) + ")"), residual(res) {}
};

// A geodesic failed to leave the surface within T_max.
struct NontrappingError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

// Expression syntax error; offset is the byte position in the source text.
struct ParseError : Error {
    std::size_t offset = 0;
    ParseError(const std::string& msg, std::size_t off)
        : Error(msg + " at offset " + std::to_string(off)), offset(off) {}
};

// ---------------------------------------------------------------------------
// Deterministic RNG. std::mt19937_64 with explicit bit-to-double conversion so
// sequences are stable regardless of the standard library's distributions.

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Marsaglia polar method, deterministic given the stream.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

  private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Static-partition parallel loop. Deterministic: worker w handles a contiguous
// index range, so writes to disjoint slots never race and reductions done per
// worker can be summed in worker order.

namespace detail {
inline int& jobs_cap() {
    static int cap = 0;
    return cap;
}
}  // namespace detail

// process-wide worker cap; 0 restores hardware concurrency
inline void set_default_jobs(int jobs) { detail::jobs_cap() = jobs; }

inline int default_jobs() {
    if (detail::jobs_cap() > 0) return detail::jobs_cap();
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : int(n);
}

inline void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t, int)>& body,
                         int jobs = 0) {
    if (jobs <= 0) jobs = default_jobs();
    if (jobs > n) jobs = int(n) > 0 ? int(n) : 1;
    if (jobs <= 1) {
        body(0, n, 0);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(jobs);
    pool.reserve(jobs);
    std::int64_t chunk = (n + jobs - 1) / jobs;
    for (int w = 0; w < jobs; ++w) {
        std::int64_t lo = w * chunk;
        std::int64_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, &errors, lo, hi, w] {
            try {
                body(lo, hi, w);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.

inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

// Thomas algorithm; diagonals overwritten. b is the main diagonal.
template <typename T>
void solve_tridiagonal(std::vector<double>& a, std::vector<double>& b, std::vector<double>& c,
                       std::vector<T>& rhs) {
    const std::size_t n = b.size();
    for (std::size_t i = 1; i < n; ++i) {
        double m = a[i] / b[i - 1];
        b[i] -= m * c[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - c[i] * rhs[i + 1]) / b[i];
}

// Least-squares slope of log(res) vs log(h); the observed convergence rate.
inline double fitted_rate(const std::vector<double>& h, const std::vector<double>& res) {
    const std::size_t n = h.size();
    if (n < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = std::log(h[i]);
        double y = std::log(std::max(res[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double denom = n * sxx - sx * sx;
    return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

}  // namespace geotomo
