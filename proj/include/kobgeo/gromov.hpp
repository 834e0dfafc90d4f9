#pragma once

#include <array>
#include <chrono>

#include "kobgeo/paths.hpp"

namespace kobgeo {

/// (x|y)_o = (d(o,x) + d(o,y) - d(x,y)) / 2. Inputs must be nonnegative and
/// satisfy the triangle inequality within tolerance.
inline double gromov_product(double d_ox, double d_oy, double d_xy, double tol = 1e-9) {
    if (d_ox < 0 || d_oy < 0 || d_xy < 0)
        throw query_error("gromov_product: negative distance");
    double scale = std::max({1.0, d_ox, d_oy, d_xy});
    if (d_xy > d_ox + d_oy + tol * scale || d_ox > d_xy + d_oy + tol * scale ||
        d_oy > d_xy + d_ox + tol * scale)
        throw query_error("gromov_product: triangle inequality violated");
    return (d_ox + d_oy - d_xy) / 2.0;
}

struct Quadruple {
    std::size_t o = 0, a = 0, b = 0, c = 0;
    std::array<cplx, 4> points{};  // o, a, b, c when positions are known
    double p_ab = 0, p_bc = 0, p_ac = 0;
    double d_oa = 0, d_ob = 0, d_oc = 0, d_ab = 0, d_bc = 0, d_ac = 0;
    double gap = 0;  // min(p_ab, p_bc) - p_ac
};

struct GromovReport {
    std::size_t sample_size = 0;
    bool enough_points = true;
    double delta_hat = 0;
    Quadruple witness;
    double seconds = 0;
    std::uint64_t tuples = 0;
};

/// Exact max over ordered quadruples of distinct indices of
/// min{(a|b)_o, (b|c)_o} - (a|c)_o. Deterministic: the witness is the
/// lexicographically smallest (o,a,b,c) attaining the max. Blocked over o and
/// merged in block order, so the result is independent of the thread budget.
inline GromovReport four_point_delta(const std::vector<double>& D, std::size_t n,
                                     const std::vector<cplx>* points = nullptr) {
    GromovReport rep;
    rep.sample_size = n;
    if (D.size() != n * n) throw invalid_parameter("four_point_delta: matrix size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (D[i * n + i] != 0.0) throw invalid_parameter("four_point_delta: nonzero diagonal");
        for (std::size_t j = i + 1; j < n; ++j) {
            if (D[i * n + j] < 0) throw invalid_parameter("four_point_delta: negative entry");
            if (std::abs(D[i * n + j] - D[j * n + i]) >
                1e-12 * std::max(1.0, std::abs(D[i * n + j])))
                throw invalid_parameter("four_point_delta: matrix not symmetric");
        }
    }
    if (n < 4) {
        rep.enough_points = false;
        return rep;
    }

    auto t0 = std::chrono::steady_clock::now();
    struct Best {
        double gap = -std::numeric_limits<double>::infinity();
        std::size_t o = 0, a = 0, b = 0, c = 0;
        bool set = false;
    };
    unsigned workers = thread_budget();
    std::vector<Best> bests(std::max<std::size_t>(1, std::min<std::size_t>(workers, n)));
    std::vector<double> products(bests.size() * n * n);

    parallel_blocks(n, [&](std::size_t block, std::size_t lo, std::size_t hi) {
        Best& best = bests[block % bests.size()];
        double* P = &products[(block % bests.size()) * n * n];
        for (std::size_t o = lo; o < hi; ++o) {
            const double* Do = &D[o * n];
            for (std::size_t a = 0; a < n; ++a) {
                const double* Da = &D[a * n];
                double doa = Do[a];
                for (std::size_t b = 0; b < n; ++b) P[a * n + b] = (doa + Do[b] - Da[b]) / 2.0;
            }
            for (std::size_t a = 0; a < n; ++a) {
                if (a == o) continue;
                const double* Pa = &P[a * n];
                for (std::size_t b = 0; b < n; ++b) {
                    if (b == o || b == a) continue;
                    const double* Pb = &P[b * n];
                    double pab = Pa[b];
                    for (std::size_t c = 0; c < n; ++c) {
                        if (c == o || c == a || c == b) continue;
                        double gap = std::min(pab, Pb[c]) - Pa[c];
                        if (gap > best.gap) {
                            best.gap = gap;
                            best.o = o;
                            best.a = a;
                            best.b = b;
                            best.c = c;
                            best.set = true;
                        }
                    }
                }
            }
        }
    });

    Best overall;
    for (const Best& b : bests)
        if (b.set && b.gap > overall.gap) overall = b;  // block order keeps the smallest o

    rep.delta_hat = overall.gap;
    Quadruple& w = rep.witness;
    w.o = overall.o;
    w.a = overall.a;
    w.b = overall.b;
    w.c = overall.c;
    w.d_oa = D[w.o * n + w.a];
    w.d_ob = D[w.o * n + w.b];
    w.d_oc = D[w.o * n + w.c];
    w.d_ab = D[w.a * n + w.b];
    w.d_bc = D[w.b * n + w.c];
    w.d_ac = D[w.a * n + w.c];
    w.p_ab = (w.d_oa + w.d_ob - w.d_ab) / 2.0;
    w.p_bc = (w.d_ob + w.d_oc - w.d_bc) / 2.0;
    w.p_ac = (w.d_oa + w.d_oc - w.d_ac) / 2.0;
    w.gap = std::min(w.p_ab, w.p_bc) - w.p_ac;
    if (points) w.points = {(*points)[w.o], (*points)[w.a], (*points)[w.b], (*points)[w.c]};
    rep.tuples = static_cast<std::uint64_t>(n) * (n - 1) * (n - 2) * (n - 3);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

inline GromovReport four_point_delta(const std::vector<std::vector<double>>& D,
                                     const std::vector<cplx>* points = nullptr) {
    std::size_t n = D.size();
    std::vector<double> flat(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        if (D[i].size() != n) throw invalid_parameter("four_point_delta: ragged matrix");
        for (std::size_t j = 0; j < n; ++j) flat[i * n + j] = D[i][j];
    }
    return four_point_delta(flat, n, points);
}

// -- Gromov sequences ----------------------------------------------------------

struct GromovSequenceReport {
    std::vector<std::vector<double>> products;  // products[m][n-m-1] = (x_m|x_n)_o
    std::vector<double> tail_minima;            // over pairs with both indices >= k
    bool verdict = false;                       // consistent with a Gromov sequence
    std::string note;
};

/// Pairwise Gromov products with running tail minima; the verdict asks the
/// last three tail levels to increase strictly.
inline GromovSequenceReport is_gromov_sequence(const std::vector<cplx>& pts, cplx o,
                                               const DistanceOracle& oracle) {
    if (pts.size() < 4) throw invalid_parameter("is_gromov_sequence: need at least 4 points");
    GromovSequenceReport rep;
    std::size_t n = pts.size();
    std::vector<double> d_o(n);
    for (std::size_t i = 0; i < n; ++i) d_o[i] = oracle(o, pts[i]).value;
    rep.products.resize(n);
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t k = m + 1; k < n; ++k) {
            double p = (d_o[m] + d_o[k] - oracle(pts[m], pts[k]).value) / 2.0;
            rep.products[m].push_back(p);
        }
    rep.tail_minima.resize(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        double mn = std::numeric_limits<double>::infinity();
        for (std::size_t m = k; m < n; ++m)
            for (std::size_t j = m + 1; j < n; ++j) mn = std::min(mn, rep.products[m][j - m - 1]);
        rep.tail_minima[k] = mn;
    }
    std::size_t L = rep.tail_minima.size();
    if (L >= 3) {
        rep.verdict = rep.tail_minima[L - 3] < rep.tail_minima[L - 2] &&
                      rep.tail_minima[L - 2] < rep.tail_minima[L - 1];
    }
    if (!rep.verdict) rep.note = "tail minima do not increase strictly over the last 3 levels";
    return rep;
}

// -- slim triangles and the Rips condition --------------------------------------

/// Minimal delta such that the kappa-triangle (alpha: b->c, beta: a->c,
/// gamma: a->b) is delta-slim, measured on resampled knots.
inline double slim_check(const Path& alpha, const Path& beta, const Path& gamma,
                         const DistanceOracle& oracle, int resample = 96) {
    auto ends_match = [](cplx p, cplx q) { return std::abs(p - q) <= 1e-9; };
    if (!ends_match(gamma.z.front(), beta.z.front()) ||
        !ends_match(gamma.z.back(), alpha.z.front()) ||
        !ends_match(alpha.z.back(), beta.z.back()))
        throw invalid_parameter("slim_check: sides do not share endpoints (want alpha: b->c, "
                                "beta: a->c, gamma: a->b)");
    auto sample = [&](const Path& p) {
        std::vector<cplx> out(resample);
        for (int i = 0; i < resample; ++i)
            out[i] = p.at(p.t_front() + p.span() * i / (resample - 1.0));
        return out;
    };
    std::array<std::vector<cplx>, 3> sides = {sample(alpha), sample(beta), sample(gamma)};
    double delta = 0;
    for (int s = 0; s < 3; ++s) {
        const auto& mine = sides[s];
        const auto& other1 = sides[(s + 1) % 3];
        const auto& other2 = sides[(s + 2) % 3];
        for (cplx p : mine) {
            double best = std::numeric_limits<double>::infinity();
            for (cplx q : other1) best = std::min(best, oracle(p, q).value);
            for (cplx q : other2) best = std::min(best, oracle(p, q).value);
            delta = std::max(delta, best);
        }
    }
    return delta;
}

struct RipsScanResult {
    std::vector<double> slim_deltas;
    double slim_max = 0;
    double delta4 = 0;  // four-point delta over the triangle vertices
    double kappa = 0;
    // Slack of the two Rips implications; nonnegative means the inequality
    // holds: slim_max <= 3 delta4 + 6 kappa and delta4 <= 3 slim_max + 6 kappa.
    double slack_slim = 0;
    double slack_delta = 0;
};

/// Builds kappa-triangles with certified (1,kappa)-almost-geodesic sides,
/// reports per-triangle slimness and the cross-check of the hyperbolicity
/// constants in both directions.
inline RipsScanResult rips_scan(const PlanarDomain& dom, const DensityField& field,
                                const DistanceOracle& oracle, double kappa,
                                const std::vector<std::array<cplx, 3>>& triples,
                                int resample = 96) {
    RipsScanResult out;
    out.kappa = kappa;
    if (triples.empty()) return out;
    std::vector<cplx> vertices;
    for (std::size_t ti = 0; ti < triples.size(); ++ti) {
        auto [a, b, c] = triples[ti];
        auto gamma = construct_almost_geodesic(dom, field, oracle, a, b, kappa);
        auto beta = construct_almost_geodesic(dom, field, oracle, a, c, kappa);
        auto alpha = construct_almost_geodesic(dom, field, oracle, b, c, kappa);
        for (const auto* g : {&gamma, &beta, &alpha})
            if (g->certificate.verdict != Verdict::Pass)
                throw query_error("rips_scan: side certification failed on triple " +
                                  std::to_string(ti));
        out.slim_deltas.push_back(slim_check(alpha.path, beta.path, gamma.path, oracle, resample));
        vertices.insert(vertices.end(), {a, b, c});
    }
    out.slim_max = *std::max_element(out.slim_deltas.begin(), out.slim_deltas.end());

    std::size_t n = vertices.size();
    std::vector<double> D(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            D[i * n + j] = D[j * n + i] = oracle(vertices[i], vertices[j]).value;
    out.delta4 = four_point_delta(D, n, &vertices).delta_hat;

    out.slack_slim = 3.0 * out.delta4 + 6.0 * kappa - out.slim_max;
    out.slack_delta = 3.0 * out.slim_max + 6.0 * kappa - out.delta4;
    return out;
}

// -- the lattice quasi-isometry experiment ---------------------------------------

struct LatticeQiRow {
    int box_radius = 0;
    std::size_t points = 0;
    double c1_prime = 0;  // empirical lower QI constant, min K / l1
    double c2 = 0;        // max{K(z0+1, z0), K(z0+i, z0)}
    double k_unit_x = 0;  // K(z0, z0+1)
    double k_unit_y = 0;  // K(z0, z0+i)
    double max_upper_ratio = 0;  // max K / (c2 * l1), should stay near <= 1
    double delta_hat = 0;
    double delta_seconds = 0;
};

struct LatticeQiResult {
    std::vector<LatticeQiRow> rows;
    cplx base;
    double raster_h = 0;
    double pde_residual = 0;
};

/// Distance matrix on the lattice orbit {z0 + m + i n}, built from a single
/// shortest-path tree via the translation invariance of the domain, then
/// four-point scans for each requested box radius.
inline LatticeQiResult lattice_qi_experiment(double hole_radius, cplx z0,
                                             const std::vector<int>& box_radii, double h,
                                             const PdeOptions& pde = {},
                                             const RelaxOptions& relax = {}) {
    auto lat = PlanarDomain::lattice_complement(hole_radius);
    if (!lat.contains(z0)) throw invalid_parameter("lattice_qi_experiment: base point in a hole");
    int rmax = *std::max_element(box_radii.begin(), box_radii.end());
    double half = 2.0 * rmax + 3.0;
    auto raster = lat.rasterize(h, z0 - cplx(half, half), z0 + cplx(half, half));
    auto field = solve_density_pde(raster, pde);

    LatticeQiResult out;
    out.base = z0;
    out.raster_h = h;
    out.pde_residual = field.residual();

    auto lambda = [&field](cplx p) { return field(p); };
    auto tree = dijkstra_field(raster, lambda, z0);

    // T[(dm, dn)] = K(z0, z0 + dm + i dn), refined by local descent;
    // symmetric under sign flip, so only half the table is walked.
    int span = 2 * rmax;
    auto key = [span](int dm, int dn) {
        return static_cast<std::size_t>(dn + span) * (2 * span + 1) + (dm + span);
    };
    std::vector<double> T((2 * span + 1) * (2 * span + 1), 0.0);
    RelaxOptions rx = relax;
    rx.max_sweeps = std::min(rx.max_sweeps, 80);
    for (int dn = 0; dn <= span; ++dn)
        for (int dm = -span; dm <= span; ++dm) {
            if (dn == 0 && dm < 0) continue;
            if (dn == 0 && dm == 0) {
                T[key(0, 0)] = 0;
                continue;
            }
            cplx target = z0 + cplx(dm, dn);
            auto poly = extract_polyline(raster, tree, target);
            if (poly.empty()) throw query_error("lattice_qi_experiment: target unreachable");
            relax_polyline(raster, lambda, poly, rx);
            double d = polyline_length(lambda, poly, 8);
            T[key(dm, dn)] = d;
            T[key(-dm, -dn)] = d;
        }

    for (int R : box_radii) {
        LatticeQiRow row;
        row.box_radius = R;
        int side = 2 * R + 1;
        std::size_t n = static_cast<std::size_t>(side) * side;
        row.points = n;
        std::vector<double> D(n * n, 0.0);
        std::vector<cplx> pts(n);
        auto idx = [side, R](int m, int nn) {
            return static_cast<std::size_t>(nn + R) * side + (m + R);
        };
        for (int nn = -R; nn <= R; ++nn)
            for (int m = -R; m <= R; ++m) pts[idx(m, nn)] = z0 + cplx(m, nn);
        row.k_unit_x = T[key(1, 0)];
        row.k_unit_y = T[key(0, 1)];
        row.c2 = std::max(row.k_unit_x, row.k_unit_y);
        double c1 = std::numeric_limits<double>::infinity();
        double upper = 0;
        for (int n1 = -R; n1 <= R; ++n1)
            for (int m1 = -R; m1 <= R; ++m1)
                for (int n2 = -R; n2 <= R; ++n2)
                    for (int m2 = -R; m2 <= R; ++m2) {
                        double d = T[key(m2 - m1, n2 - n1)];
                        D[idx(m1, n1) * n + idx(m2, n2)] = d;
                        int l1 = std::abs(m2 - m1) + std::abs(n2 - n1);
                        if (l1 > 0) {
                            c1 = std::min(c1, d / l1);
                            upper = std::max(upper, d / (row.c2 * l1));
                        }
                    }
        row.c1_prime = c1;
        row.max_upper_ratio = upper;
        auto rep = four_point_delta(D, n, &pts);
        row.delta_hat = rep.delta_hat;
        row.delta_seconds = rep.seconds;
        out.rows.push_back(row);
    }
    return out;
}

// -- annulus fatness -------------------------------------------------------------

struct FatnessRow {
    double s = 0;
    double c = 0;          // unit-speed constant of the core circle (2/pi)
    double gap = 0;        // (x|y)_p - min{(x|z)_p, (y|z)_p}, the paper's quantity
    double predicted = 0;  // -pi / (2 c s)
    double scan_delta = 0;       // four-point scan over the witness quadruple
    double lift_check_error = 0;  // max |K(sigma(t1), sigma(t2)) - |t1 - t2||
};

/// The Lemma-witness quadruple on the core circle of A_s at angles
/// 0, pi/2, -pi, 3pi/2, with distances from the covering-lift oracle. The
/// constant c is computed from the strip density and validated against the
/// distance oracle, not assumed.
inline std::vector<FatnessRow> annulus_fatness(const std::vector<double>& s_values) {
    std::vector<FatnessRow> rows;
    for (double s : s_values) {
        if (!(s > 0 && s <= 1)) throw invalid_parameter("annulus_fatness: s must lie in (0, 1]");
        FatnessRow row;
        row.s = s;
        auto strip = PlanarDomain::strip(s);
        DensityField strip_density(strip);
        double lambda_mid = strip_density(cplx(-s / 2.0, 0));
        row.c = 1.0 / (s * lambda_mid);  // unit speed: lambda * c * s = 1

        auto ann = PlanarDomain::annulus(s);
        double radius = std::exp(-s / 2.0);
        auto sigma = [&](double t) { return radius * unit_dir(row.c * s * t); };
        double quarter = kPi / (2.0 * row.c * s);

        // Independent validation of c: the core circle is unit speed.
        for (double t1 : {0.0, 0.3 * quarter}) {
            for (double dt : {0.1 * quarter, 0.5 * quarter, quarter}) {
                double K = annulus_distance(s, sigma(t1), sigma(t1 + dt));
                row.lift_check_error = std::max(row.lift_check_error, std::abs(K - dt));
            }
        }

        cplx p = sigma(0), x = sigma(quarter), z = sigma(-2.0 * quarter), y = sigma(3.0 * quarter);
        double d_px = annulus_distance(s, p, x);
        double d_py = annulus_distance(s, p, y);
        double d_pz = annulus_distance(s, p, z);
        double d_xy = annulus_distance(s, x, y);
        double d_xz = annulus_distance(s, x, z);
        double d_yz = annulus_distance(s, y, z);
        double p_xy = (d_px + d_py - d_xy) / 2.0;
        double p_xz = (d_px + d_pz - d_xz) / 2.0;
        double p_yz = (d_py + d_pz - d_yz) / 2.0;
        row.gap = p_xy - std::min(p_xz, p_yz);
        row.predicted = -kPi / (2.0 * row.c * s);

        std::vector<cplx> pts = {p, x, z, y};
        std::vector<double> D(16, 0.0);
        auto set = [&](int i, int j, double v) { D[i * 4 + j] = D[j * 4 + i] = v; };
        set(0, 1, d_px);
        set(0, 2, d_pz);
        set(0, 3, d_py);
        set(1, 2, d_xz);
        set(1, 3, d_xy);
        set(2, 3, d_yz);
        row.scan_delta = four_point_delta(D, 4, &pts).delta_hat;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace kobgeo
