// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances and runtime budgets are pinned in code.

#include <chrono>
#include <cstdio>
#include <random>

#include "kobgeo/dynamics.hpp"
#include "kobgeo/gromov.hpp"
#include "kobgeo/scenario.hpp"
#include "kobgeo/visibility.hpp"

using namespace kobgeo;

namespace {

int g_failures = 0;

double now() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

void report(int id, const char* title, bool ok, double seconds, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%.1f s)%s%s\n", ok ? "PASS" : "FAIL", id, title, seconds,
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Annulus fatness: witness gap = -pi^2/(4s) within 1%, monotone divergence.
void criterion1() {
    double t0 = now();
    bool ok = true;
    std::string detail;
    auto rows = annulus_fatness({0.5, 0.2, 0.1});
    for (const auto& r : rows) {
        double rel = std::abs(r.gap - r.predicted) / std::abs(r.predicted);
        detail += "s=" + fmt(r.s) + " gap=" + fmt(r.gap) + " rel=" + fmt(rel) + "; ";
        ok = ok && rel <= 0.01;
        ok = ok && std::abs(r.c - 2.0 / kPi) <= 1e-12;
        ok = ok && r.lift_check_error <= 1e-10;
    }
    ok = ok && rows[1].gap < rows[0].gap && rows[2].gap < rows[1].gap;  // divergence trend
    double dt = now() - t0;
    ok = ok && dt < 5.0;
    report(1, "annulus fatness matches -pi^2/(4s)", ok, dt, detail);
}

// ---------------------------------------------------------------------------
// 2. Raster geodesic for the disk 0 -> 0.9 at h = 1/256 within 0.5%.
void criterion2() {
    double t0 = now();
    auto disk = PlanarDomain::disk();
    auto raster = disk.rasterize(1.0 / 256);
    DensityField f(raster);
    auto nd = numeric_distance(raster, [&](cplx p) { return f(p); }, cplx(0, 0), cplx(0.9, 0));
    double expect = std::atanh(0.9);
    double rel = std::abs(nd.value - expect) / expect;
    double dt = now() - t0;
    bool ok = nd.connected && rel <= 0.005 && dt < 30.0;
    report(2, "numeric disk distance within 0.5% of arctanh 0.9", ok, dt,
           "value=" + fmt(nd.value) + " expect=" + fmt(expect) + " rel=" + fmt(rel));
}

// ---------------------------------------------------------------------------
// 3. PDE density on the Annulus(1) raster at h = 1/256: max relative error
//    <= 2% against the covering pullback on cells with delta >= 10h.
void criterion3() {
    double t0 = now();
    auto ann = PlanarDomain::annulus(1.0);
    double h = 1.0 / 256;
    auto raster = ann.rasterize(h);
    auto field = solve_density_pde(raster);
    DensityField exact(ann);
    const RasterMask& m = raster.mask();
    double worst = 0;
    std::size_t cells = 0;
    for (int j = 0; j < m.ny(); ++j)
        for (int i = 0; i < m.nx(); ++i) {
            if (!m.at(i, j)) continue;
            cplx z = m.center(i, j);
            if (ann.clearance(z) < 10 * h) continue;
            ++cells;
            double lam = std::exp(field.log_at_cell(i, j));
            worst = std::max(worst, std::abs(lam - exact(z)) / exact(z));
        }
    double dt = now() - t0;
    bool ok = worst <= 0.02 && cells > 10000 && dt < 120.0;
    report(3, "annulus pde density within 2% beyond the 10h collar", ok, dt,
           "max_rel=" + fmt(worst) + " cells=" + fmt(static_cast<double>(cells)) +
               " residual=" + fmt(field.residual()));
}

// ---------------------------------------------------------------------------
// 4. Theorem constants: 50-triangle rips scans on Disk and Annulus(0.5)
//    satisfy both slack inequalities with violation <= 1e-3.
void criterion4() {
    double t0 = now();
    bool ok = true;
    std::string detail;
    struct Case {
        PlanarDomain dom;
        const char* name;
    };
    std::vector<Case> cases = {{PlanarDomain::disk(), "disk"},
                               {PlanarDomain::annulus(0.5), "annulus(0.5)"}};
    for (auto& c : cases) {
        DensityField f(c.dom);
        auto oracle = make_exact_oracle(c.dom);
        std::mt19937 rng(0);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::vector<std::array<cplx, 3>> triples;
        while (triples.size() < 50) {
            std::array<cplx, 3> t{cplx(u(rng), u(rng)), cplx(u(rng), u(rng)),
                                  cplx(u(rng), u(rng))};
            bool in = true;
            for (cplx z : t)
                if (!c.dom.contains(z)) in = false;
            if (!in) continue;
            if (std::abs(t[0] - t[1]) < 0.1 || std::abs(t[1] - t[2]) < 0.1 ||
                std::abs(t[0] - t[2]) < 0.1)
                continue;
            triples.push_back(t);
        }
        auto res = rips_scan(c.dom, f, oracle, 0.05, triples);
        detail += std::string(c.name) + ": slim=" + fmt(res.slim_max) +
                  " delta4=" + fmt(res.delta4) + " slacks=" + fmt(res.slack_slim) + "/" +
                  fmt(res.slack_delta) + "; ";
        ok = ok && res.slack_slim >= -1e-3 && res.slack_delta >= -1e-3;
    }
    double dt = now() - t0;
    ok = ok && dt < 120.0;
    report(4, "rips scans satisfy the (3 delta + 6 kappa) cross-checks", ok, dt, detail);
}

// ---------------------------------------------------------------------------
// 5. Lattice non-hyperbolicity: delta_hat strictly grows (>= 10% per step)
//    across R = 2, 4, 8, and the QI sandwich holds.
void criterion5() {
    double t0 = now();
    PdeOptions pde;
    pde.tolerance = 1e-7;
    auto res = lattice_qi_experiment(0.25, cplx(0.5, 0.5), {2, 4, 8}, 1.0 / 16, pde);
    std::string detail;
    bool ok = res.rows.size() == 3;
    for (const auto& row : res.rows) {
        detail += "R=" + std::to_string(row.box_radius) + " delta=" + fmt(row.delta_hat) +
                  " C1'=" + fmt(row.c1_prime) + " C2=" + fmt(row.c2) +
                  " up=" + fmt(row.max_upper_ratio) + "; ";
        ok = ok && row.c1_prime > 0 && row.max_upper_ratio <= 1.05;
    }
    if (res.rows.size() == 3) {
        ok = ok && res.rows[1].delta_hat >= 1.10 * res.rows[0].delta_hat;
        ok = ok && res.rows[2].delta_hat >= 1.10 * res.rows[1].delta_hat;
    }
    double dt = now() - t0;
    ok = ok && dt < 600.0;
    report(5, "lattice four-point delta grows with the box radius", ok, dt, detail);
}

// ---------------------------------------------------------------------------
// 6. Goldilocks diagnostics pass on disk, annulus, lattice; disk distance
//    exponent alpha = 0.5 +- 0.05.
void criterion6() {
    double t0 = now();
    bool ok = true;
    std::string detail;

    auto disk = PlanarDomain::disk();
    DensityField fd(disk);
    auto rep_disk = goldilocks_report(
        disk, fd, [&](cplx a, cplx b) { return exact_distance(disk, a, b); }, cplx(1, 0), 0.5,
        cplx(0, 0));
    ok = ok && rep_disk.condition1 == Verdict::Pass && rep_disk.condition2 == Verdict::Pass;
    ok = ok && std::abs(rep_disk.dist_fit.slope - 0.5) <= 0.05;
    detail += "disk alpha=" + fmt(rep_disk.dist_fit.slope) + "; ";

    auto ann = PlanarDomain::annulus(1.0);
    DensityField fa(ann);
    auto rep_ann = goldilocks_report(
        ann, fa, [&](cplx a, cplx b) { return exact_distance(ann, a, b); }, cplx(1, 0), 0.3,
        cplx(std::exp(-0.5), 0));
    ok = ok && rep_ann.condition1 == Verdict::Pass && rep_ann.condition2 == Verdict::Pass;
    detail += "annulus alpha=" + fmt(rep_ann.dist_fit.slope) + "; ";

    // Lattice: conditions fitted on certified bounds. Near the hole at the
    // origin the round annulus {0.25 < |z| < 0.5} sits inside the domain and
    // the hole exterior contains it, sandwiching both the density and the
    // distance:
    //   1/lambda(z) <= 2 d log(d / 0.25),   d = |z|,
    //   K(z0, z)    <= K_num(z0, anchor) + K_{A(0.25,0.5)}(anchor, z).
    {
        auto lat = PlanarDomain::lattice_complement(0.25);
        cplx x(0.25, 0), z0(0.5, 0.5), anchor(0.45, 0);
        std::vector<double> lx, ly;
        for (int j = 0; j < 12; ++j) {
            double r = 0.1 * std::pow(2.0, -j);
            double d = 0.25 + r;
            lx.push_back(std::log(r));
            ly.push_back(std::log(2.0 * d * std::log(d / 0.25)));
        }
        auto m_fit = fit_line(lx, ly);
        bool cond1 = m_fit.slope >= 0.1 && m_fit.residual <= 0.2;

        double h = 1.0 / 64;
        auto raster = lat.rasterize(h, cplx(-2.5, -2.5), cplx(3.5, 3.5));
        PdeOptions pde;
        pde.tolerance = 1e-7;
        auto field = solve_density_pde(raster, pde);
        auto base_leg =
            numeric_distance(raster, [&](cplx p) { return field(p); }, z0, anchor);
        double s_local = std::log(2.0);  // A(0.25, 0.5) = 0.5 * A_{log 2}
        std::vector<double> dx, dy;
        for (int k = 0; k < 12; ++k) {
            double delta = 0.1 * std::pow(2.0, -k);
            cplx z = x + delta * cplx(1, 0);
            double tail = annulus_distance(s_local, anchor / 0.5, z / 0.5);
            dx.push_back(std::log(1.0 / delta));
            dy.push_back(base_leg.value + tail);
        }
        auto d_fit = fit_line(dx, dy);
        bool cond2 = d_fit.slope >= 0.0 && d_fit.residual <= 0.2;
        ok = ok && cond1 && cond2;
        detail += "lattice alphaM=" + fmt(m_fit.slope) + " alpha=" + fmt(d_fit.slope);
    }
    double dt = now() - t0;
    report(6, "goldilocks diagnostics pass (disk, annulus, lattice)", ok, dt, detail);
}

// ---------------------------------------------------------------------------
// 7. Radial almost-geodesic on the disk certifies at lambda <= 2 with
//    kappa <= 1e-3 over a 64^2 pair grid.
void criterion7() {
    double t0 = now();
    auto disk = PlanarDomain::disk();
    DensityField f(disk);
    auto oracle = make_exact_oracle(disk);
    auto r = radial_almost_geodesic(disk, f, oracle, cplx(1, 0), cplx(-1, 0), 1.0, 3.0, 64);
    bool ok = r.certificate.verdict == Verdict::Pass && r.lambda_hat <= 2.0 &&
              r.certificate.kappa <= 1e-3 && r.certificate.grid_n == 64;
    double dt = now() - t0;
    report(7, "radial almost-geodesic certifies at lambda <= 2", ok, dt,
           "lambda_hat=" + fmt(r.lambda_hat) + " kappa=" + fmt(r.certificate.kappa) +
               " bracket=[" + fmt(r.bracket_lo) + "," + fmt(r.bracket_hi) + "]");
}

// ---------------------------------------------------------------------------
// 8. Wolff-Denjoy dichotomy across the three map families + record times.
void criterion8() {
    double t0 = now();
    bool ok = true;
    std::string detail;

    auto rot = MapSpec::disk_rotation(1.0);
    auto disk = rot.domain();
    auto disk_dist = [&](cplx a, cplx b) { return exact_distance(disk, a, b); };
    auto rep_rot = orbit_report(rot, {cplx(0.3, 0), cplx(0.1, 0.2)}, 500, disk_dist);
    ok = ok && rep_rot.verdict == OrbitVerdict::RelativelyCompact;
    detail += "rotation: compact; ";

    auto mob = MapSpec::disk_mobius(cplx(0.5, 0));
    auto rep_mob = orbit_report(mob, {0.0, cplx(0, 0.3), cplx(-0.2, 0.1)}, 30, disk_dist);
    ok = ok && rep_mob.verdict == OrbitVerdict::ConvergesToBoundaryPoint;
    ok = ok && std::abs(rep_mob.limit_point - cplx(1, 0)) <= 1e-6;
    detail += "mobius limit=" + fmt(rep_mob.limit_point.real()) + "; ";

    // Record times exhaust the running maxima of d_n.
    {
        auto nu = rep_mob.records;
        std::vector<std::size_t> naive;
        for (std::size_t j = 0; j < rep_mob.d.size(); ++j) {
            bool rec = true;
            for (std::size_t i = 0; i < j; ++i)
                if (rep_mob.d[i] >= rep_mob.d[j]) rec = false;
            if (rec) naive.push_back(j + 1);
        }
        bool increasing = true;
        for (std::size_t i = 1; i < nu.size(); ++i) increasing = increasing && nu[i] > nu[i - 1];
        ok = ok && increasing && nu == naive && nu.size() == rep_mob.d.size();
        detail += "records=" + std::to_string(nu.size()) + "/" +
                  std::to_string(rep_mob.d.size()) + "; ";
    }

    auto trans = MapSpec::lattice_translation(cplx(1, 0));
    auto lat = trans.domain();
    auto raster = lat.rasterize(1.0 / 10, cplx(-20, -20), cplx(20, 20));
    auto tree = build_end_tree(raster, {4.0, 8.0, 11.0});
    PdeOptions pde;
    pde.tolerance = 1e-7;
    auto field = solve_density_pde(raster, pde);
    cplx base(0.5, 0.5);
    auto src = dijkstra_field(raster, [&](cplx p) { return field(p); }, base);
    auto lat_dist = [&](cplx, cplx w) {
        int i, j;
        raster.mask().locate(w, i, j);
        return src.dist[raster.mask().index(i, j)];
    };
    auto rep_lat = orbit_report(trans, {base, cplx(0.5, -0.4)}, 16, lat_dist, &tree);
    ok = ok && rep_lat.verdict == OrbitVerdict::ConvergesToEnd && count_ends(tree) == 1 &&
         rep_lat.limit_end >= 0;
    detail += "lattice: end " + std::to_string(rep_lat.limit_end) + " of " +
              std::to_string(count_ends(tree));
    double dt = now() - t0;
    report(8, "Wolff-Denjoy dichotomy verdicts", ok, dt, detail);
}

// ---------------------------------------------------------------------------
// 9. End trees: disk 0, strip 2, lattice 1, depth-5 tree 32, plus the
//    exhaustion-independence bijection on all four.
PlanarDomain make_tree_raster(int depth, double D, double corridor, double h, double window) {
    struct Seg {
        cplx a, b;
    };
    std::vector<Seg> segs;
    auto node = [&](int k, int j) {
        return (k * D) * unit_dir(2 * kPi * (j + 0.5) / std::pow(2.0, k));
    };
    for (int k = 0; k + 1 <= depth; ++k)
        for (int j = 0; j < (1 << k); ++j) {
            segs.push_back({node(k, j), node(k + 1, 2 * j)});
            segs.push_back({node(k, j), node(k + 1, 2 * j + 1)});
        }
    for (int j = 0; j < (1 << depth); ++j) {
        cplx leaf = node(depth, j);
        segs.push_back({leaf, leaf * (window * 1.6 / std::abs(leaf))});
    }
    int n = static_cast<int>(std::ceil(2 * window / h));
    RasterMask m(n, n, cplx(-window, -window), h);
    auto seg_dist = [](cplx p, const Seg& s) {
        cplx d = s.b - s.a;
        double t = std::clamp(((p - s.a) * std::conj(d)).real() / std::norm(d), 0.0, 1.0);
        return std::abs(p - (s.a + t * d));
    };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            cplx c = m.center(i, j);
            for (const Seg& s : segs)
                if (seg_dist(c, s) <= corridor) {
                    m.set(i, j, true);
                    break;
                }
        }
    return PlanarDomain::raster(std::move(m));
}

bool deepest_bijection(const EndTree& a, const EndTree& b) {
    if (count_ends(a) != count_ends(b)) return false;
    const RasterMask& cl = a.closure;
    std::vector<int> image(b.levels.back().size(), -2);
    for (int j = 0; j < cl.ny(); ++j)
        for (int i = 0; i < cl.nx(); ++i) {
            std::int32_t lb = b.labels.back()[cl.index(i, j)];
            if (lb < 0) continue;
            std::int32_t la = a.labels.back()[cl.index(i, j)];
            if (la < 0) return false;  // refinement must stay inside
            if (image[lb] == -2) image[lb] = la;
            if (image[lb] != la) return false;
        }
    std::vector<int> hit;
    for (std::size_t k = 0; k < image.size(); ++k)
        if (b.levels.back()[k].unbounded && image[k] >= 0) hit.push_back(image[k]);
    std::sort(hit.begin(), hit.end());
    return std::adjacent_find(hit.begin(), hit.end()) == hit.end();
}

void criterion9() {
    double t0 = now();
    bool ok = true;
    std::string detail;

    auto disk = PlanarDomain::disk().rasterize(1.0 / 64);
    auto t_disk = build_end_tree(disk, {2.0, 4.0});
    ok = ok && count_ends(t_disk) == 0;
    detail += "disk=0 ";

    auto strip = PlanarDomain::strip(1.0).rasterize(1.0 / 16, cplx(-1.02, -10), cplx(0.02, 10));
    auto t_strip = build_end_tree(strip, {2.0, 4.0});
    ok = ok && count_ends(t_strip) == 2;
    ok = ok && deepest_bijection(t_strip, build_end_tree(strip, {4.0, 8.0}));
    detail += "strip=" + std::to_string(count_ends(t_strip)) + " ";

    auto lat =
        PlanarDomain::lattice_complement(0.25).rasterize(1.0 / 8, cplx(-20, -20), cplx(20, 20));
    auto t_lat = build_end_tree(lat, {4.0, 8.0});
    ok = ok && count_ends(t_lat) == 1;
    ok = ok && deepest_bijection(t_lat, build_end_tree(lat, {8.0, 16.0}));
    detail += "lattice=" + std::to_string(count_ends(t_lat)) + " ";

    double D = 1.2;
    auto tree_dom = make_tree_raster(5, D, 0.12, 0.06, 14.5);
    std::vector<double> radii = {1.5 * D, 2.5 * D, 3.5 * D, 4.5 * D, 5.5 * D};
    auto t_tree = build_end_tree(tree_dom, radii);
    ok = ok && count_ends(t_tree) == 32;
    std::vector<double> doubled;
    for (double r : radii) doubled.push_back(2 * r);
    ok = ok && deepest_bijection(t_tree, build_end_tree(tree_dom, doubled));
    detail += "tree=" + std::to_string(count_ends(t_tree));

    // Disk independence: both exhaustions see zero ends.
    ok = ok && count_ends(build_end_tree(disk, {4.0, 8.0})) == 0;

    double dt = now() - t0;
    report(9, "end trees (0 / 2 / 1 / 32) with exhaustion independence", ok, dt, detail);
}

// ---------------------------------------------------------------------------
// 10. Invariant suites over >= 10^4 randomized trials, seed 0.
void criterion10() {
    double t0 = now();
    std::mt19937 rng(0);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::size_t trials = 0;
    int violations = 0;
    std::string detail;

    // Schwarz-Pick monotonicity across three inclusion pairs.
    {
        auto inner_disk = PlanarDomain::disk(cplx(0, 1), 1.0);
        auto hp = PlanarDomain::half_plane();
        DensityField f_in(inner_disk), f_hp(hp);
        auto a_small = PlanarDomain::annulus(0.5);
        auto a_big = PlanarDomain::annulus(1.0);
        DensityField f_as(a_small), f_ab(a_big);
        auto strip = PlanarDomain::strip(1.0);
        auto disk_in_strip = PlanarDomain::disk(cplx(-0.5, 0), 0.5);
        DensityField f_st(strip), f_ds(disk_in_strip);
        int done = 0;
        while (done < 2500) {
            cplx z(u(rng), u(rng));
            cplx zh = z + cplx(0, 1.0);
            if (inner_disk.contains(zh)) {
                ++done, ++trials;
                if (f_in(zh) < f_hp(zh) - 1e-12) ++violations;
            }
            if (a_small.contains(z)) {
                ++done, ++trials;
                if (f_as(z) < f_ab(z) - 1e-12) ++violations;
            }
            cplx zs = cplx(-0.5 + 0.5 * u(rng), 0.5 * u(rng));
            if (disk_in_strip.contains(zs)) {
                ++done, ++trials;
                if (f_ds(zs) < f_st(zs) - 1e-12) ++violations;
            }
        }
    }

    // Triangle inequality and symmetry on exact kinds.
    {
        std::vector<PlanarDomain> doms = {PlanarDomain::disk(), PlanarDomain::annulus(1.0),
                                          PlanarDomain::strip(1.0)};
        for (const auto& dom : doms) {
            int done = 0;
            while (done < 900) {
                cplx a(u(rng), u(rng)), b(u(rng), u(rng)), c(u(rng), u(rng));
                if (dom.kind() == DomainKind::Strip) {
                    a = cplx(-0.5 + 0.49 * u(rng), 3 * u(rng));
                    b = cplx(-0.5 + 0.49 * u(rng), 3 * u(rng));
                    c = cplx(-0.5 + 0.49 * u(rng), 3 * u(rng));
                }
                if (!dom.contains(a) || !dom.contains(b) || !dom.contains(c)) continue;
                ++done;
                ++trials;
                double ab = exact_distance(dom, a, b);
                double ba = exact_distance(dom, b, a);
                double ac = exact_distance(dom, a, c);
                double cb = exact_distance(dom, c, b);
                if (std::abs(ab - ba) > 1e-12 * std::max(1.0, ab)) ++violations;
                if (ab > ac + cb + 1e-12 * std::max(1.0, ab)) ++violations;
            }
        }
    }

    // Lemma bound: Gromov product against distance to a near-geodesic,
    // (sigma(0)|sigma(T))_z <= K(z, sigma) + 3 kappa / 2.
    {
        auto disk = PlanarDomain::disk();
        DensityField f(disk);
        auto oracle = make_exact_oracle(disk);
        double kappa = 0.05;
        int curves = 0;
        while (curves < 50) {
            cplx a(u(rng) * 0.9, u(rng) * 0.9), b(u(rng) * 0.9, u(rng) * 0.9);
            if (!disk.contains(a) || !disk.contains(b) || std::abs(a - b) < 0.05) continue;
            ++curves;
            auto g = construct_almost_geodesic(disk, f, oracle, a, b, kappa);
            for (int k = 0; k < 20; ++k) {
                cplx z(u(rng) * 0.95, u(rng) * 0.95);
                if (!disk.contains(z)) continue;
                ++trials;
                double product = (oracle(z, a).value + oracle(z, b).value -
                                  oracle(a, b).value) /
                                 2.0;
                double dist_curve = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < g.path.knots(); i += 4)
                    dist_curve = std::min(dist_curve, oracle(z, g.path.z[i]).value);
                if (product > dist_curve + 1.5 * kappa + 1e-6) ++violations;
            }
        }
    }

    // Derivative bound along almost-geodesics: |sigma'| <= lambda *
    // M_hat(delta), with M_hat tabulated by the visibility module.
    {
        auto disk = PlanarDomain::disk();
        DensityField f(disk);
        auto oracle = make_exact_oracle(disk);
        std::vector<double> r_grid;
        for (int k = 0; k < 160; ++k) r_grid.push_back(1.0 * (k + 1) / 160);
        auto table = m_function(disk, f, cplx(0, 0), 1.2, r_grid);
        auto m_hat = [&](double delta) {
            for (const MRow& row : table)
                if (row.r >= delta) return row.m_hat;
            return table.back().m_hat;
        };
        int curves = 0;
        while (curves < 25) {
            cplx a(u(rng) * 0.9, u(rng) * 0.9), b(u(rng) * 0.9, u(rng) * 0.9);
            if (!disk.contains(a) || !disk.contains(b) || std::abs(a - b) < 0.3) continue;
            ++curves;
            auto g = construct_almost_geodesic(disk, f, oracle, a, b, 0.05);
            std::size_t stride = std::max<std::size_t>(1, g.path.knots() / 60);
            for (std::size_t i = 0; i + stride < g.path.knots(); i += stride) {
                ++trials;
                double dt = g.path.t[i + stride] - g.path.t[i];
                double speed = std::abs(g.path.z[i + stride] - g.path.z[i]) / dt;
                double delta = disk.clearance(0.5 * (g.path.z[i] + g.path.z[i + stride]));
                if (speed > 1.0 * m_hat(delta) * (1 + 1e-3) + 1e-9) ++violations;
            }
        }
    }

    // 1-Lipschitz dynamics on every closed-form map family.
    {
        struct Case {
            MapSpec map;
            PlanarDomain dom;
        };
        std::vector<Case> cases;
        cases.push_back({MapSpec::disk_mobius(cplx(0.3, 0.2), 0.4), PlanarDomain::disk()});
        cases.push_back({MapSpec::disk_rotation(1.1), PlanarDomain::disk()});
        cases.push_back({MapSpec::annulus_rotation(0.8, 1.0), PlanarDomain::annulus(1.0)});
        cases.push_back({MapSpec::half_plane_affine(1.7, 0.3), PlanarDomain::half_plane()});
        for (const auto& c : cases) {
            int done = 0;
            while (done < 700) {
                cplx z(u(rng), u(rng)), w(u(rng), u(rng));
                if (c.dom.kind() == DomainKind::HalfPlane) {
                    z = cplx(2 * u(rng), 0.1 + std::abs(u(rng)));
                    w = cplx(2 * u(rng), 0.1 + std::abs(u(rng)));
                }
                if (!c.dom.contains(z) || !c.dom.contains(w)) continue;
                ++done;
                ++trials;
                double before = exact_distance(c.dom, z, w);
                double after = exact_distance(c.dom, c.map.apply(z), c.map.apply(w));
                if (after > before + 1e-9 * std::max(1.0, before)) ++violations;
            }
        }
    }

    double dt = now() - t0;
    bool ok = violations == 0 && trials >= 10000;
    report(10, "invariant suites clean over 10^4 randomized trials", ok, dt,
           "trials=" + std::to_string(trials) + " violations=" + std::to_string(violations));
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    std::printf("%d/10 criteria passed\n", 10 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
