#pragma once

#include <functional>

#include "kobgeo/density.hpp"
#include "kobgeo/distance.hpp"

namespace kobgeo {

/// Discretized parametrized curve, interpolated piecewise linearly.
struct Path {
    std::vector<double> t;
    std::vector<cplx> z;

    bool empty() const { return z.empty(); }
    std::size_t knots() const { return z.size(); }
    double t_front() const { return t.front(); }
    double t_back() const { return t.back(); }
    double span() const { return t.back() - t.front(); }

    cplx at(double s) const {
        if (s <= t.front()) return z.front();
        if (s >= t.back()) return z.back();
        auto it = std::upper_bound(t.begin(), t.end(), s);
        std::size_t i = static_cast<std::size_t>(it - t.begin());
        double f = (s - t[i - 1]) / (t[i] - t[i - 1]);
        return z[i - 1] + f * (z[i] - z[i - 1]);
    }

    void validate() const {
        if (z.size() != t.size() || z.empty())
            throw invalid_parameter("path: knot/point count mismatch");
        for (std::size_t i = 1; i < t.size(); ++i)
            if (!(t[i] > t[i - 1])) throw invalid_parameter("path: knots must strictly increase");
    }
};

/// Distance estimate with an error half-width (0-ish for exact oracles).
struct DistEst {
    double value = 0;
    double error = 0;
};
using DistanceOracle = std::function<DistEst(cplx, cplx)>;

inline DistanceOracle make_exact_oracle(const PlanarDomain& dom) {
    if (!has_exact_distance(dom)) throw invalid_parameter("no exact distance for this domain kind");
    PlanarDomain d = dom;
    return [d](cplx z, cplx w) {
        double v = exact_distance(d, z, w);
        return DistEst{v, 1e-12 * std::max(1.0, v)};
    };
}

/// Per-query grid oracle (Dijkstra each call; use sparingly).
inline DistanceOracle make_grid_oracle(const PlanarDomain& dom, const DensityField& field) {
    PlanarDomain d = dom;
    const DensityField* f = &field;
    return [d, f](cplx z, cplx w) {
        auto nd = numeric_distance(d, [f](cplx p) { return (*f)(p); }, z, w);
        return DistEst{nd.value, nd.error};
    };
}

/// Kobayashi length by composite midpoint quadrature, subdividing until the
/// estimates agree to 1e-6 relative. Throws (naming the segment) if a segment
/// leaves the domain.
inline double path_length(const PlanarDomain& dom, const DensityField& field, const Path& path) {
    path.validate();
    double total = 0;
    for (std::size_t i = 0; i + 1 < path.z.size(); ++i) {
        cplx a = path.z[i], b = path.z[i + 1];
        double len = std::abs(b - a);
        if (len == 0) continue;
        auto estimate = [&](int m) {
            double acc = 0;
            for (int q = 0; q < m; ++q) {
                cplx p = a + (b - a) * ((q + 0.5) / m);
                if (!dom.contains(p))
                    throw query_error("path_length: segment " + std::to_string(i) +
                                      " exits the domain");
                acc += field(p);
            }
            return acc / m * len;
        };
        double prev = estimate(1);
        double refined = prev;
        for (int m = 2; m <= 4096; m *= 2) {
            double cur = estimate(m);
            refined = (4.0 * cur - prev) / 3.0;  // Richardson step
            if (std::abs(cur - prev) < 1e-9 + 1e-7 * std::abs(cur)) break;
            prev = cur;
        }
        total += refined;
    }
    return total;
}

// -- exact unit-speed geodesics ------------------------------------------------

namespace detail {

/// Unit-speed geodesic in the unit disk from u to v, as a map of t in [0, K].
inline std::function<cplx(double)> unit_disk_geodesic(cplx u, cplx v, double* length_out) {
    cplx tv = (v - u) / (1.0 - std::conj(u) * v);
    double rho = std::abs(tv);
    cplx dir = rho > 0 ? tv / rho : cplx(1, 0);
    *length_out = std::atanh(rho);
    return [u, dir](double t) {
        cplx w = std::tanh(t) * dir;
        return (w + u) / (1.0 + std::conj(u) * w);
    };
}

/// Unit-speed geodesic in the upper half plane from p to q (vertical ray or
/// semicircle orthogonal to the axis, in the sech/tanh parametrization that
/// stays accurate for deep points).
inline std::function<cplx(double)> half_plane_geodesic(cplx p, cplx q, double* length_out) {
    double xp = p.real(), yp = p.imag(), xq = q.real(), yq = q.imag();
    double scale = std::max({std::abs(xp), std::abs(xq), yp, yq});
    if (std::abs(xq - xp) <= 1e-14 * scale) {
        double T = std::abs(std::log(yq / yp)) / 2.0;
        double sign = yq >= yp ? 1.0 : -1.0;
        *length_out = T;
        return [xp, yp, sign](double t) { return cplx(xp, yp * std::exp(2.0 * sign * t)); };
    }
    double c = (xq * xq + yq * yq - xp * xp - yp * yp) / (2.0 * (xq - xp));
    double rho = std::hypot(xp - c, yp);
    double sp = std::asinh((c - xp) / yp);
    double sq = std::asinh((c - xq) / yq);
    double sign = sq >= sp ? 1.0 : -1.0;
    *length_out = std::abs(sq - sp) / 2.0;
    return [c, rho, sp, sign](double t) {
        double s = sp + 2.0 * sign * t;
        return cplx(c - rho * std::tanh(s), rho / std::cosh(s));
    };
}

/// Strip {-s < Re < 0} to the upper half plane.
inline cplx strip_to_half_plane(double s, cplx z) { return std::exp(cplx(0, kPi) * (z + s) / s); }
inline cplx half_plane_to_strip(double s, cplx w) {
    cplx lw = std::log(w);  // arg in (0, pi)
    return cplx(lw.imag() * s / kPi - s, -lw.real() * s / kPi);
}

/// Unit-speed geodesic in the strip, recentered vertically so the half-plane
/// chart cannot overflow for centered spans.
inline std::function<cplx(double)> strip_geodesic(double s, cplx z, cplx w, double* length_out) {
    double mid = 0.5 * (z.imag() + w.imag());
    cplx shift(0, mid);
    auto g = half_plane_geodesic(strip_to_half_plane(s, z - shift),
                                 strip_to_half_plane(s, w - shift), length_out);
    return [g, s, shift](double t) { return half_plane_to_strip(s, g(t)) + shift; };
}

}  // namespace detail

/// Unit-speed geodesic parametrization from z to w for kinds with exact
/// oracles; returns the map and the total parameter span K(z, w).
inline std::function<cplx(double)> exact_geodesic(const PlanarDomain& dom, cplx z, cplx w,
                                                  double* length_out) {
    DomainKind k = dom.kind() == DomainKind::Raster ? dom.source_kind() : dom.kind();
    switch (k) {
        case DomainKind::Disk: {
            cplx c = dom.disk_center();
            double R = dom.disk_radius();
            auto g = detail::unit_disk_geodesic((z - c) / R, (w - c) / R, length_out);
            return [g, c, R](double t) { return c + R * g(t); };
        }
        case DomainKind::HalfPlane: return detail::half_plane_geodesic(z, w, length_out);
        case DomainKind::Strip:
            return detail::strip_geodesic(dom.modulus(), z, w, length_out);
        case DomainKind::Annulus: {
            double s = dom.modulus();
            long kbest = 0;
            annulus_distance(s, z, w, &kbest);
            cplx lz = std::log(z), lw = std::log(w) + cplx(0, 2.0 * kPi * kbest);
            auto g = detail::strip_geodesic(s, lz, lw, length_out);
            return [g](double t) { return std::exp(g(t)); };
        }
        case DomainKind::PuncturedDisk: {
            long kbest = 0;
            punctured_disk_distance(z, w, &kbest);
            cplx lz(std::arg(z), -std::log(std::abs(z)));
            cplx lw = cplx(std::arg(w), -std::log(std::abs(w))) + cplx(2.0 * kPi * kbest, 0);
            auto g = detail::half_plane_geodesic(lz, lw, length_out);
            return [g](double t) { return std::exp(cplx(0, 1) * g(t)); };
        }
        default: throw query_error("exact_geodesic: no closed form for this domain kind");
    }
}

/// Geodesic knots at uniform parameter spacing, built by recursive midpoint
/// bisection so each midpoint is evaluated in a chart centered on its own
/// scale. Robust for long geodesics, where a single chart loses the far
/// endpoint. segments must be a power of two.
inline std::vector<cplx> exact_geodesic_knots(const PlanarDomain& dom, cplx z, cplx w,
                                              int segments) {
    std::vector<cplx> knots(static_cast<std::size_t>(segments) + 1);
    knots.front() = z;
    knots.back() = w;
    std::function<void(int, int)> bisect = [&](int i0, int i1) {
        if (i1 - i0 < 2) return;
        int im = (i0 + i1) / 2;
        double T = 0;
        auto g = exact_geodesic(dom, knots[i0], knots[i1], &T);
        knots[im] = g(T / 2);
        bisect(i0, im);
        bisect(im, i1);
    };
    bisect(0, segments);
    return knots;
}

// -- certification ---------------------------------------------------------------

enum class Verdict { Pass, Fail, Inconclusive };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct AlmostGeodesicCertificate {
    double lambda = 1;
    double kappa = 0;
    int grid_n = 64;
    double max_violation = 0;  // > 0 breaks the two-sided inequality
    double max_speed = 0;
    double max_oracle_error = 0;
    Verdict verdict = Verdict::Fail;
};

struct CertifyOptions {
    int grid_n = 64;
    double speed_tol = 1e-3;
};

/// Checks lambda^{-1}|t-s| - kappa <= K(sigma(t), sigma(s)) <= lambda|t-s| +
/// kappa on an n x n parameter grid, with the oracle's error bar absorbed
/// into the violation, plus the sampled speed bound. Verdict is inconclusive
/// when the oracle error exceeds kappa/4.
inline AlmostGeodesicCertificate certify(const PlanarDomain& dom, const DensityField& field,
                                         const DistanceOracle& oracle, const Path& path,
                                         double lambda, double kappa,
                                         const CertifyOptions& opt = {}) {
    path.validate();
    AlmostGeodesicCertificate cert;
    cert.lambda = lambda;
    cert.kappa = kappa;
    cert.grid_n = opt.grid_n;

    int n = std::max(2, opt.grid_n);
    std::vector<double> ts(n);
    std::vector<cplx> ps(n);
    for (int i = 0; i < n; ++i) {
        ts[i] = path.t_front() + path.span() * i / (n - 1.0);
        ps[i] = path.at(ts[i]);
    }

    double viol = -std::numeric_limits<double>::infinity();
    double max_err = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            DistEst d = oracle(ps[i], ps[j]);
            max_err = std::max(max_err, d.error);
            double dt = ts[j] - ts[i];
            viol = std::max(viol, dt / lambda - kappa - (d.value + d.error));
            viol = std::max(viol, (d.value - d.error) - (lambda * dt + kappa));
        }
    cert.max_violation = viol;
    cert.max_oracle_error = max_err;

    // Sampled speed per knot segment: pairing the chord with its own
    // parameter interval keeps the estimate consistent to O(dt^2).
    double speed = 0;
    std::size_t stride = std::max<std::size_t>(1, path.knots() / 4096);
    for (std::size_t i = 0; i + stride < path.knots(); i += stride) {
        double dt = path.t[i + stride] - path.t[i];
        if (dt <= 0) continue;
        cplx mid = 0.5 * (path.z[i] + path.z[i + stride]);
        if (!dom.contains(mid)) continue;
        speed = std::max(speed, field(mid) * std::abs(path.z[i + stride] - path.z[i]) / dt);
    }
    cert.max_speed = speed;

    bool ok = viol <= 0 && speed <= lambda * (1.0 + opt.speed_tol);
    if (kappa > 0 && max_err > kappa / 4) {
        cert.verdict = Verdict::Inconclusive;
    } else {
        cert.verdict = ok ? Verdict::Pass : Verdict::Fail;
    }
    return cert;
}

// -- construction -----------------------------------------------------------------

struct ConstructOptions {
    int grid_n = 64;
    double speed_tol = 1e-3;
    int max_knots = 4096;
    RelaxOptions relax;
};

struct ConstructedGeodesic {
    Path path;
    AlmostGeodesicCertificate certificate;
    double length = 0;
};

/// (1, kappa)-almost-geodesic between distinct points: exact unit-speed
/// geodesic where a closed form exists, otherwise the grid pipeline
/// reparametrized to near-unit speed. The certificate is returned even when
/// it fails (no silent pass).
inline ConstructedGeodesic construct_almost_geodesic(const PlanarDomain& dom,
                                                     const DensityField& field,
                                                     const DistanceOracle& oracle, cplx z, cplx w,
                                                     double kappa,
                                                     const ConstructOptions& opt = {}) {
    if (z == w) throw invalid_parameter("construct_almost_geodesic: endpoints coincide");
    if (!(kappa > 0)) throw invalid_parameter("construct_almost_geodesic: kappa must be positive");
    ConstructedGeodesic out;

    if (has_exact_distance(dom)) {
        double T = exact_distance(dom, z, w);
        if (!std::isfinite(T) || T <= 0)
            throw query_error("construct_almost_geodesic: degenerate endpoint distance");
        double dt = std::min(0.02, std::max(kappa / 8.0, T / opt.max_knots));
        int segments = 2;
        while (segments < opt.max_knots && T / segments > dt) segments *= 2;
        auto knots = exact_geodesic_knots(dom, z, w, segments);
        int n = segments + 1;
        out.path.t.resize(n);
        out.path.z = std::move(knots);
        for (int i = 0; i < n; ++i) out.path.t[i] = T * i / (n - 1.0);
    } else {
        auto nd = numeric_distance(dom, [&field](cplx p) { return field(p); }, z, w, opt.relax);
        if (!nd.connected)
            throw query_error("construct_almost_geodesic: endpoints in different components");
        // Reparametrize the polyline by its Kobayashi arc length.
        const auto& poly = nd.polyline;
        std::vector<double> cum(poly.size(), 0.0);
        for (std::size_t i = 1; i < poly.size(); ++i)
            cum[i] = cum[i - 1] +
                     segment_length([&field](cplx p) { return field(p); }, poly[i - 1], poly[i], 8);
        out.path.t.clear();
        out.path.z.clear();
        for (std::size_t i = 0; i < poly.size(); ++i) {
            if (i > 0 && !(cum[i] > cum[i - 1])) continue;  // drop zero-length steps
            out.path.t.push_back(cum[i]);
            out.path.z.push_back(poly[i]);
        }
    }
    out.length = path_length(dom, field, out.path);
    out.certificate =
        certify(dom, field, oracle, out.path, 1.0, kappa, {opt.grid_n, opt.speed_tol});
    return out;
}

// -- quasi-geodesic taming ---------------------------------------------------------

struct TameResult {
    Path path;
    double hausdorff = 0;
    bool precondition_ok = true;
    std::pair<std::size_t, std::size_t> offending{0, 0};
};

/// Joins samples of a (lambda0, kappa0)-quasi-geodesic, taken at unit
/// parameter spacing, by (1,1)-almost-geodesics, and measures the two-sided
/// Kobayashi Hausdorff distance between the sample set and the tamed path.
inline TameResult tame_quasi_geodesic(const PlanarDomain& dom, const DensityField& field,
                                      const DistanceOracle& oracle,
                                      const std::vector<double>& t_samples,
                                      const std::vector<cplx>& z_samples, double lambda0,
                                      double kappa0) {
    if (t_samples.size() != z_samples.size() || t_samples.size() < 2)
        throw invalid_parameter("tame_quasi_geodesic: need at least two samples");
    TameResult out;
    for (std::size_t i = 0; i < t_samples.size(); ++i)
        for (std::size_t j = i + 1; j < t_samples.size(); ++j) {
            double dt = std::abs(t_samples[j] - t_samples[i]);
            DistEst d = oracle(z_samples[i], z_samples[j]);
            if (d.value + d.error < dt / lambda0 - kappa0 ||
                d.value - d.error > lambda0 * dt + kappa0) {
                out.precondition_ok = false;
                out.offending = {i, j};
                return out;
            }
        }

    // Subsequence at (approximately) unit parameter spacing.
    std::vector<std::size_t> picks{0};
    for (std::size_t i = 1; i + 1 < t_samples.size(); ++i)
        if (t_samples[i] >= t_samples[picks.back()] + 1.0) picks.push_back(i);
    picks.push_back(t_samples.size() - 1);

    double t0 = 0;
    out.path.t.push_back(0);
    out.path.z.push_back(z_samples[picks[0]]);
    for (std::size_t s = 0; s + 1 < picks.size(); ++s) {
        cplx a = z_samples[picks[s]], b = z_samples[picks[s + 1]];
        if (a == b) continue;
        auto leg = construct_almost_geodesic(dom, field, oracle, a, b, 1.0);
        for (std::size_t i = 1; i < leg.path.knots(); ++i) {
            out.path.t.push_back(t0 + leg.path.t[i]);
            out.path.z.push_back(leg.path.z[i]);
        }
        t0 = out.path.t.back();
    }
    if (out.path.knots() < 2) {  // all samples coincide
        out.path.t.push_back(1.0);
        out.path.z.push_back(z_samples.back());
    }

    // Two-sided Hausdorff between the sample set and the tamed path knots.
    double h1 = 0;
    for (cplx zs : z_samples) {
        double best = std::numeric_limits<double>::infinity();
        for (cplx p : out.path.z) best = std::min(best, oracle(zs, p).value);
        h1 = std::max(h1, best);
    }
    double h2 = 0;
    for (cplx p : out.path.z) {
        double best = std::numeric_limits<double>::infinity();
        for (cplx zs : z_samples) best = std::min(best, oracle(p, zs).value);
        h2 = std::max(h2, best);
    }
    out.hausdorff = std::max(h1, h2);
    return out;
}

// -- radial almost-geodesics --------------------------------------------------------

struct RadialGeodesic {
    Path path;
    AlmostGeodesicCertificate certificate;
    double lambda_hat = 1;
    double bracket_lo = 0;  // 2 a_xi, per unit parameter
    double bracket_hi = 0;  // 2 / m
    ConeParams cone;
};

/// sigma(t) = x + (reach/2) e^{-2t} axis on [0, T], certified at the smallest
/// lambda passing (kappa = 1e-9). Requires an interior cone at x with the
/// given axis and reach; the aperture is searched on the 32-step grid.
inline RadialGeodesic radial_almost_geodesic(const PlanarDomain& dom, const DensityField& field,
                                             const DistanceOracle& oracle, cplx x, cplx axis,
                                             double reach, double T, int grid_n = 64) {
    axis /= std::abs(axis);
    ConeParams cone;
    cone.apex = x;
    cone.axis = axis;
    cone.reach = reach;
    cone.side = ConeSide::Interior;
    double theta = 0;
    for (int j = 32; j >= 1; --j) {
        cone.aperture = kPi * j / 33.0;
        if (verify_cone(dom, cone, 16) && verify_cone(dom, cone, 64)) {
            theta = cone.aperture;
            break;
        }
    }
    if (theta == 0) throw query_error("radial_almost_geodesic: interior cone verification fails");
    cone.aperture = theta;

    RadialGeodesic out;
    out.cone = cone;
    double m = std::sin(theta / 2);
    double a_xi = m / (4.0 * (2.0 - m));
    out.bracket_lo = 2.0 * a_xi;
    out.bracket_hi = 2.0 / m;

    if (T <= 0) {
        out.path.t = {0.0};
        out.path.z = {x + (reach / 2.0) * axis};
        out.certificate.verdict = Verdict::Pass;
        out.certificate.lambda = 1;
        out.certificate.kappa = 0;
        out.lambda_hat = 1;
        return out;
    }

    int n = std::max(grid_n, 128) + 1;
    out.path.t.resize(n);
    out.path.z.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = T * i / (n - 1.0);
        out.path.t[i] = t;
        out.path.z[i] = x + (reach / 2.0) * std::exp(-2.0 * t) * axis;
    }

    // Smallest lambda over the pair grid and the sampled speeds.
    double lam = 1.0;
    int gn = std::max(2, grid_n);
    for (int i = 0; i < gn; ++i)
        for (int j = i + 1; j < gn; ++j) {
            double ti = T * i / (gn - 1.0), tj = T * j / (gn - 1.0);
            cplx zi = x + (reach / 2.0) * std::exp(-2.0 * ti) * axis;
            cplx zj = x + (reach / 2.0) * std::exp(-2.0 * tj) * axis;
            double K = oracle(zi, zj).value;
            double dt = tj - ti;
            if (K > 0 && dt > 0) lam = std::max({lam, K / dt, dt / K});
        }
    for (int i = 0; i + 1 < n; ++i) {
        cplx mid = 0.5 * (out.path.z[i] + out.path.z[i + 1]);
        double spd = field(mid) * std::abs(out.path.z[i + 1] - out.path.z[i]) /
                     (out.path.t[i + 1] - out.path.t[i]);
        lam = std::max(lam, spd);
    }
    out.lambda_hat = lam;
    out.certificate = certify(dom, field, oracle, out.path, lam * (1 + 1e-9) + 1e-12, 1e-9,
                              {grid_n, 1e-3});
    return out;
}

}  // namespace kobgeo
