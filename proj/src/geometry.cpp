#include "morselab/geometry.hpp"

#include "morselab/errors.hpp"
#include "morselab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace morselab {

namespace {

constexpr double kUnitSpeedTol = 1e-10;
constexpr double kFirstIntegralTol = 1e-8;
constexpr double kIntegratorTol = 1e-8;
constexpr double kMaxInternalStep = 1e-3;  // in units of r0

double ipow(double x, int k) { return int_pow(x, k); }

// sqrt(1 - rho^{-2m}) without cancellation near the neck.
double slope_from_rho(double rho, int m) {
    return std::sqrt(-std::expm1(-2.0 * m * std::log1p(rho - 1.0)));
}

struct State {
    double rho, v, zeta;
};

State rk4_step(const State& y, double dt, int m) {
    auto rhs = [m](const State& u) {
        const double inv = 1.0 / u.rho;
        const double invm = ipow(inv, m);
        return State{u.v, m * invm * invm * inv, invm};
    };
    const State k1 = rhs(y);
    const State k2 = rhs({y.rho + 0.5 * dt * k1.rho, y.v + 0.5 * dt * k1.v, y.zeta + 0.5 * dt * k1.zeta});
    const State k3 = rhs({y.rho + 0.5 * dt * k2.rho, y.v + 0.5 * dt * k2.v, y.zeta + 0.5 * dt * k2.zeta});
    const State k4 = rhs({y.rho + dt * k3.rho, y.v + dt * k3.v, y.zeta + dt * k3.zeta});
    return {y.rho + dt / 6 * (k1.rho + 2 * k2.rho + 2 * k3.rho + k4.rho),
            y.v + dt / 6 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v),
            y.zeta + dt / 6 * (k1.zeta + 2 * k2.zeta + 2 * k3.zeta + k4.zeta)};
}

[[noreturn]] void inconsistent(const std::string& what, Eigen::Index idx, double value) {
    std::ostringstream os;
    os << "profile grid invariant violated: " << what << " at sample " << idx << " (" << value << ")";
    throw ConsistencyError(os.str());
}

}  // namespace

std::string to_string(SurfaceKind kind) {
    return kind == SurfaceKind::catenoid ? "catenoid" : "plane";
}

SurfaceKind surface_kind_from_string(const std::string& name) {
    if (name == "catenoid") return SurfaceKind::catenoid;
    if (name == "plane") return SurfaceKind::plane;
    throw DomainError("unknown surface kind '" + name + "'");
}

ProfileGrid solve_profile(int n, double r0, double s_max, Eigen::Index N) {
    if (n < 3 || n > 7) throw DomainError("ambient dimension must lie in [3, 7]");
    if (!(r0 > 0)) throw DomainError("neck radius must be positive");
    if (!(s_max >= 0)) throw DomainError("s_max must be non-negative");
    if (s_max > 0 && N < 2) throw DomainError("need at least two samples per side");
    if (s_max == 0) N = 0;

    const int m = n - 2;
    ProfileGrid g;
    g.n = n;
    g.r0 = r0;
    g.s_max = s_max;
    g.h = N > 0 ? s_max / static_cast<double>(N) : 0.0;
    g.kind = SurfaceKind::catenoid;
    const Eigen::Index size = 2 * N + 1;
    g.s.resize(size);
    g.r.resize(size);
    g.z.resize(size);
    g.rp.resize(size);
    g.zp.resize(size);

    // Integrate rho'' = m rho^{-2m-1}, zeta' = rho^{-m} in units of r0. The
    // second-order form is the derivative of the first integral
    // rho'^2 = 1 - rho^{-2m} and is smooth through the neck.
    const double hs = g.h / r0;
    const auto substeps = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::ceil(hs / kMaxInternalStep)));
    const double dt = N > 0 ? hs / static_cast<double>(substeps) : 0.0;
    State y{1.0, 0.0, 0.0};
    for (Eigen::Index k = 0; k <= N; ++k) {
        if (k > 0)
            for (Eigen::Index q = 0; q < substeps; ++q) y = rk4_step(y, dt, m);
        const double rho = y.rho;
        const double slope = slope_from_rho(rho, m);
        if (std::abs(slope - y.v) > kIntegratorTol) inconsistent("integrator slope drift", k, slope - y.v);
        const double zp = ipow(1.0 / rho, m);
        const Eigen::Index up = N + k, down = N - k;
        g.s(up) = static_cast<double>(k) * g.h;
        g.r(up) = r0 * rho;
        g.z(up) = r0 * y.zeta;
        g.rp(up) = slope;
        g.zp(up) = zp;
        g.s(down) = -g.s(up);
        g.r(down) = g.r(up);
        g.z(down) = -g.z(up);
        g.rp(down) = -slope;
        g.zp(down) = zp;
    }
    check_invariants(g);
    return g;
}

ProfileGrid make_plane(int n, double s_max, Eigen::Index N) {
    if (n < 3 || n > 7) throw DomainError("ambient dimension must lie in [3, 7]");
    if (!(s_max > 0)) throw DomainError("s_max must be positive");
    if (N < 2) throw DomainError("need at least two samples");
    ProfileGrid g;
    g.n = n;
    g.r0 = 0.0;
    g.s_max = s_max;
    g.h = s_max / static_cast<double>(N);
    g.kind = SurfaceKind::plane;
    g.s.resize(N + 1);
    for (Eigen::Index k = 0; k <= N; ++k) g.s(k) = static_cast<double>(k) * g.h;
    g.r = g.s;
    g.z = Eigen::VectorXd::Zero(N + 1);
    g.rp = Eigen::VectorXd::Ones(N + 1);
    g.zp = Eigen::VectorXd::Zero(N + 1);
    check_invariants(g);
    return g;
}

void check_invariants(const ProfileGrid& g) {
    const Eigen::Index size = g.size();
    for (Eigen::Index k = 0; k < size; ++k) {
        const double speed = g.rp(k) * g.rp(k) + g.zp(k) * g.zp(k) - 1.0;
        if (std::abs(speed) > kUnitSpeedTol) inconsistent("unit speed", k, speed);
    }
    if (g.is_plane()) {
        for (Eigen::Index k = 0; k < size; ++k)
            if (g.r(k) != g.s(k) || g.z(k) != 0.0) inconsistent("plane representation", k, g.r(k) - g.s(k));
        return;
    }
    const int m = g.sphere_dim();
    const double c = ipow(g.r0, m);
    const Eigen::Index mid = g.neck();
    for (Eigen::Index k = 0; k < size; ++k) {
        const double fi = (ipow(g.r(k), m) * g.zp(k) - c) / c;
        if (std::abs(fi) > kFirstIntegralTol) inconsistent("first integral", k, fi);
        const Eigen::Index mirror = size - 1 - k;
        if (std::abs(g.r(k) - g.r(mirror)) > 1e-10 || std::abs(g.z(k) + g.z(mirror)) > 1e-10)
            inconsistent("reflection symmetry", k, g.r(k) - g.r(mirror));
        if (k != mid && !(g.r(k) > g.r0)) inconsistent("radius above neck", k, g.r(k) - g.r0);
    }
    if (g.r(mid) != g.r0) inconsistent("neck radius", mid, g.r(mid) - g.r0);
}

GeometryFrame frame_at(const ProfileGrid& g, Eigen::Index idx) {
    if (idx < 0 || idx >= g.size()) throw DomainError("sample index out of range");
    GeometryFrame f;
    const double r = g.r(idx);
    if (r == 0.0) return f;  // axis point of the plane
    const int m = g.sphere_dim();
    f.kappa_m = g.zp(idx) / r;
    f.kappa_p = -m * f.kappa_m;
    f.normsqA = (m + 1.0) * m * f.kappa_m * f.kappa_m;
    f.nu_axis = g.rp(idx);
    f.nu_radial_coeff = -g.zp(idx);
    f.weight = std::pow(r, m);
    return f;
}

double profile_slope(const ProfileGrid& g, double r) {
    if (g.is_plane()) return 1.0;
    return slope_from_rho(r / g.r0, g.sphere_dim());
}

Eigen::VectorXd principal_curvatures(const ProfileGrid& g, Eigen::Index idx) {
    const GeometryFrame f = frame_at(g, idx);
    Eigen::VectorXd k(g.n - 1);
    k.head(g.n - 2).setConstant(f.kappa_m);
    k(g.n - 2) = f.kappa_p;
    return k;
}

RadialMetric radial_metric(const ProfileGrid& g) {
    const int m = g.sphere_dim();
    const Eigen::Index size = g.size();
    RadialMetric rm;
    rm.weight.resize(size);
    rm.normsqA.resize(size);
    rm.inv_r2.resize(size);
    for (Eigen::Index k = 0; k < size; ++k) {
        const double r = g.r(k);
        rm.weight(k) = ipow(r, m);
        rm.inv_r2(k) = r > 0 ? 1.0 / (r * r) : 0.0;
        const double km = r > 0 ? g.zp(k) / r : 0.0;
        rm.normsqA(k) = (m + 1.0) * m * km * km;
    }
    const Eigen::Index cells = std::max<Eigen::Index>(0, size - 1);
    rm.flux.resize(cells);
    rm.cell_inverse_weight.resize(cells);
    for (Eigen::Index k = 0; k < cells; ++k) {
        const double a = g.r(k), b = g.r(k + 1);
        if (a == 0.0 || b == 0.0) {
            rm.cell_inverse_weight(k) = std::numeric_limits<double>::infinity();
            rm.flux(k) = 0.0;
            continue;
        }
        // Hermite-corrected trapezoid, fourth order in h.
        const double fa = ipow(1.0 / a, m), fb = ipow(1.0 / b, m);
        const double da = -m * fa / a * g.rp(k), db = -m * fb / b * g.rp(k + 1);
        const double integral = 0.5 * g.h * (fa + fb) + g.h * g.h / 12.0 * (da - db);
        rm.cell_inverse_weight(k) = integral;
        rm.flux(k) = g.h / integral;
    }
    return rm;
}

std::pair<double, double> integrate_to_infinity(const std::function<double(double)>& f, double R) {
    static const auto coarse = gauss_legendre<double>(24);
    static const auto fine = gauss_legendre<double>(48);
    auto rule = [&](const auto& nw) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < nw.first.size(); ++i) {
            const double t = 0.5 * (nw.first(i) + 1.0);
            acc += 0.5 * nw.second(i) * f(R / t) * R / (t * t);
        }
        return acc;
    };
    const double a = rule(fine);
    return {a, std::abs(a - rule(coarse))};
}

ProfilePoint interpolate(const ProfileGrid& g, Eigen::Index cell, double s) {
    const double h = g.h;
    const double t = (s - g.s(cell)) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    const double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1, d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
    const Eigen::Index a = cell, b = cell + 1;
    ProfilePoint p;
    p.r = h00 * g.r(a) + h10 * h * g.rp(a) + h01 * g.r(b) + h11 * h * g.rp(b);
    p.z = h00 * g.z(a) + h10 * h * g.zp(a) + h01 * g.z(b) + h11 * h * g.zp(b);
    p.rp = (d00 * g.r(a) + d01 * g.r(b)) / h + d10 * g.rp(a) + d11 * g.rp(b);
    p.zp = (d00 * g.z(a) + d01 * g.z(b)) / h + d10 * g.zp(a) + d11 * g.zp(b);
    return p;
}

TotalCurvature total_curvature(const ProfileGrid& g, double rel_tol) {
    TotalCurvature tc;
    if (g.is_plane() || g.size() < 3) return tc;
    const int m = g.sphere_dim();
    const double c = std::pow((m + 1.0) * m, 0.5 * (g.n - 1));
    Eigen::VectorXd integrand(g.size());
    for (Eigen::Index k = 0; k < g.size(); ++k)
        integrand(k) = c * std::pow(g.zp(k) / g.r(k), g.n - 1) * std::pow(g.r(k), m);

    const double fine = simpson(integrand, g.h);
    Eigen::VectorXd every_other(g.size() / 2 + 1);
    for (Eigen::Index k = 0; k < every_other.size(); ++k) every_other(k) = integrand(2 * k);
    const double coarse = simpson(every_other, 2 * g.h);

    const double r0m = std::pow(g.r0, m);
    auto tail_integrand = [&](double r) {
        return c * std::pow(r0m * std::pow(r, -m) / r, g.n - 1) * std::pow(r, m) / profile_slope(g, r);
    };
    const auto [tail_one, tail_err] = integrate_to_infinity(tail_integrand, g.r(g.last()));

    const double vol = sphere_volume(m);
    tc.tail = vol * 2.0 * tail_one;
    tc.value = vol * fine + tc.tail;
    tc.error_estimate = vol * (std::abs(fine - coarse) / 15.0 + 2.0 * tail_err);
    if (tc.error_estimate > rel_tol * std::abs(tc.value))
        throw AccuracyError("total curvature: grid too coarse for the requested tolerance", tc.error_estimate);
    return tc;
}

DecayFit end_asymptotics(const ProfileGrid& g) {
    DecayFit fit;
    if (g.is_plane()) {
        fit.trivial_end = true;
        return fit;
    }
    if (g.n < 4) throw DivergenceError("end height diverges logarithmically for n = 3");
    const int m = g.sphere_dim();
    const Eigen::Index last = g.last();
    const double R = g.r(last);
    if (R < 20.0 * g.r0) throw RangeError("grid must reach r >= 20 r0 for the decay fit");
    fit.fit_r_max = R;
    fit.fit_r_min = R / 10.0;

    const double r0m = std::pow(g.r0, m);
    const auto [tail, tail_err] = integrate_to_infinity(
        [&](double r) { return r0m * std::pow(r, -m) / profile_slope(g, r); }, R);
    (void)tail_err;
    fit.z_infinity = g.z(last) + tail;

    Eigen::Index first = last;
    while (first > g.neck() && g.r(first - 1) >= fit.fit_r_min) --first;
    const Eigen::Index count = last - first + 1;
    if (count < 8) throw RangeError("decay fit window holds too few samples");
    const Eigen::Index stride = std::max<Eigen::Index>(1, count / 4000);

    std::vector<double> lx, lu, lg;
    for (Eigen::Index k = first; k <= last; k += stride) {
        const double u = fit.z_infinity - g.z(k);
        lx.push_back(std::log(g.r(k)));
        lu.push_back(std::log(std::abs(u)));
        lg.push_back(std::log(g.zp(k) / g.rp(k)));
    }
    auto slope = [&](const std::vector<double>& y) {
        const Eigen::Index p = static_cast<Eigen::Index>(lx.size());
        Eigen::MatrixXd A(p, 2);
        Eigen::VectorXd b(p);
        for (Eigen::Index i = 0; i < p; ++i) {
            A(i, 0) = 1.0;
            A(i, 1) = lx[i];
            b(i) = y[i];
        }
        return A.colPivHouseholderQr().solve(b)(1);
    };
    fit.exponent_u = slope(lu);
    fit.exponent_grad = slope(lg);
    fit.limit_of_scaled_u = std::pow(R, g.n - 3) * (fit.z_infinity - g.z(last));
    return fit;
}

LevelSetChecks levelset_and_volume_checks(const ProfileGrid& g, double R) {
    const int m = g.sphere_dim();
    auto radius = [&](Eigen::Index k) { return std::hypot(g.r(k), g.z(k)); };
    const Eigen::Index start = g.neck(), last = g.last();
    if (!(R > radius(start)) || R > radius(last)) throw RangeError("R outside the extent of the grid");

    // |x| is increasing along s >= 0.
    Eigen::Index lo = start, hi = last;
    while (hi - lo > 1) {
        const Eigen::Index mid = (lo + hi) / 2;
        (radius(mid) <= R ? lo : hi) = mid;
    }
    double a = g.s(lo), b = g.s(hi);
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
        const double mid = 0.5 * (a + b);
        const ProfilePoint p = interpolate(g, lo, mid);
        (std::hypot(p.r, p.z) <= R ? a : b) = mid;
    }
    const double sR = 0.5 * (a + b);
    const ProfilePoint atR = interpolate(g, lo, sR);

    static const auto gl = gauss_legendre<double>(5);
    auto cell_integral = [&](Eigen::Index cell, double from, double to) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < gl.first.size(); ++i) {
            const double s = 0.5 * (from + to) + 0.5 * (to - from) * gl.first(i);
            acc += gl.second(i) * std::pow(interpolate(g, cell, s).r, m);
        }
        return 0.5 * (to - from) * acc;
    };
    double integral = 0.0;
    for (Eigen::Index k = start; k < lo; ++k) integral += cell_integral(k, g.s(k), g.s(k + 1));
    integral += cell_integral(lo, g.s(lo), sR);

    LevelSetChecks out;
    out.s_at_R = sR;
    out.levelset_radius = atR.r;
    out.pinching_residual = std::abs(1.0 / (atR.r * atR.r) - 1.0 / (R * R));
    const double volume = g.ends() * sphere_volume(m) * integral;
    out.volume_ratio = volume / (ball_volume(g.n - 1) * std::pow(R, g.n - 1));
    double decay = 0.0;
    for (Eigen::Index k = start; k <= last; ++k) {
        const double rho = radius(k);
        if (rho < R) continue;
        decay = std::max(decay, std::sqrt(frame_at(g, k).normsqA) * rho);
    }
    out.curvature_decay = decay;
    return out;
}

}  // namespace morselab
