#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "kobgeo/gromov.hpp"

using namespace kobgeo;

TEST_CASE("gromov product basics") {
    CHECK(gromov_product(2.0, 2.0, 0.0) == Catch::Approx(2.0));  // x = y
    CHECK(gromov_product(1.5, 0.0, 1.5) == Catch::Approx(0.0));  // y = o
    auto disk = PlanarDomain::disk();
    double r = 0.7;
    double d = exact_distance(disk, 0.0, cplx(r, 0));
    double dd = exact_distance(disk, cplx(r, 0), cplx(-r, 0));
    CHECK(gromov_product(d, d, dd) == Catch::Approx(0.0).margin(1e-12));

    CHECK_THROWS_AS(gromov_product(1.0, 1.0, 5.0), query_error);
    CHECK_THROWS_AS(gromov_product(-1.0, 1.0, 1.0), query_error);
}

TEST_CASE("gromov product range on random disk triples") {
    auto disk = PlanarDomain::disk();
    std::mt19937 rng(0);
    std::uniform_real_distribution<double> u(-0.95, 0.95);
    int done = 0;
    while (done < 500) {
        cplx o(u(rng), u(rng)), x(u(rng), u(rng)), y(u(rng), u(rng));
        if (!disk.contains(o) || !disk.contains(x) || !disk.contains(y)) continue;
        ++done;
        double dox = exact_distance(disk, o, x), doy = exact_distance(disk, o, y);
        double p = gromov_product(dox, doy, exact_distance(disk, x, y));
        CHECK(p >= -1e-12);
        CHECK(p <= std::min(dox, doy) + 1e-12);
    }
}

TEST_CASE("four-point delta on a metric line and a tree") {
    auto disk = PlanarDomain::disk();
    std::vector<cplx> pts = {cplx(-0.9, 0), cplx(-0.3, 0), cplx(0.4, 0), cplx(0.8, 0)};
    std::size_t n = pts.size();
    std::vector<double> D(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) D[i * n + j] = exact_distance(disk, pts[i], pts[j]);
    auto rep = four_point_delta(D, n, &pts);
    CHECK(rep.enough_points);
    CHECK(std::abs(rep.delta_hat) <= 1e-9);
    // Witness invariant: products recompute from the stored distances.
    const auto& w = rep.witness;
    CHECK(w.p_ab == Catch::Approx((w.d_oa + w.d_ob - w.d_ab) / 2).margin(1e-12));
    CHECK(w.gap == Catch::Approx(rep.delta_hat).margin(1e-12));

    // Star-tree metric d(i,j) = a_i + a_j is 0-hyperbolic.
    std::vector<double> a = {1.0, 2.0, 3.0, 4.0, 2.5};
    std::size_t m = a.size();
    std::vector<double> T(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (i != j) T[i * m + j] = a[i] + a[j];
    CHECK(std::abs(four_point_delta(T, m).delta_hat) <= 1e-9);
}

TEST_CASE("four-point delta rejects bad input and small samples") {
    std::vector<double> D(9, 0.0);
    auto rep3 = four_point_delta(D, 3);
    CHECK_FALSE(rep3.enough_points);

    std::vector<double> bad = {0, 1, 2, 0};
    CHECK_THROWS_AS(four_point_delta(bad, 2), invalid_parameter);
    std::vector<double> asym(16, 1.0);
    for (int i = 0; i < 4; ++i) asym[i * 4 + i] = 0;
    asym[1] = 2.0;  // d(0,1) != d(1,0)
    CHECK_THROWS_AS(four_point_delta(asym, 4), invalid_parameter);
}

TEST_CASE("annulus fatness witnesses") {
    auto rows = annulus_fatness({0.5, 0.2, 0.1});
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
        CHECK(row.c == Catch::Approx(2.0 / kPi).epsilon(1e-12));
        CHECK(row.lift_check_error <= 1e-10);
        CHECK(row.gap == Catch::Approx(row.predicted).epsilon(0.01));
        CHECK(row.scan_delta == Catch::Approx(-row.predicted).epsilon(0.01));
    }
    CHECK(rows[0].gap == Catch::Approx(-kPi * kPi / 2).epsilon(1e-9));
    CHECK(rows[0].gap == Catch::Approx(-4.934802).margin(1e-5));
    CHECK(rows[2].gap == Catch::Approx(-24.674011).margin(1e-4));
    // Monotone divergence as s decreases.
    CHECK(rows[1].gap < rows[0].gap);
    CHECK(rows[2].gap < rows[1].gap);

    // Adjacent-pair distance equals the quarter-period parameter gap.
    double s = 0.5;
    double c = 2.0 / kPi;
    double quarter = kPi / (2.0 * c * s);
    double r = std::exp(-s / 2.0);
    CHECK(annulus_distance(s, r, r * unit_dir(c * s * quarter)) ==
          Catch::Approx(kPi * kPi / (4.0 * s)).epsilon(1e-12));
}

TEST_CASE("gromov sequences in the disk") {
    auto disk = PlanarDomain::disk();
    auto oracle = make_exact_oracle(disk);

    std::vector<cplx> toward;
    for (int n = 1; n <= 8; ++n) toward.push_back(cplx(1.0 - std::pow(2.0, -n), 0));
    auto rep = is_gromov_sequence(toward, 0.0, oracle);
    CHECK(rep.verdict);
    for (std::size_t k = 1; k < rep.tail_minima.size(); ++k)
        CHECK(rep.tail_minima[k] >= rep.tail_minima[k - 1] - 1e-12);

    std::vector<cplx> alternating;
    for (int n = 1; n <= 8; ++n)
        alternating.push_back(cplx((n % 2 ? 1.0 : -1.0) * (1.0 - std::pow(2.0, -n)), 0));
    CHECK_FALSE(is_gromov_sequence(alternating, 0.0, oracle).verdict);

    std::vector<cplx> constant(6, cplx(0.5, 0));
    CHECK_FALSE(is_gromov_sequence(constant, 0.0, oracle).verdict);

    CHECK_THROWS_AS(is_gromov_sequence({0.0, 0.1}, 0.0, oracle), invalid_parameter);
}

namespace {
struct Triangle {
    Path alpha, beta, gamma;
};
Triangle build_triangle(const PlanarDomain& dom, const DensityField& f,
                        const DistanceOracle& oracle, cplx a, cplx b, cplx c, double kappa) {
    Triangle t;
    t.gamma = construct_almost_geodesic(dom, f, oracle, a, b, kappa).path;
    t.beta = construct_almost_geodesic(dom, f, oracle, a, c, kappa).path;
    t.alpha = construct_almost_geodesic(dom, f, oracle, b, c, kappa).path;
    return t;
}
}  // namespace

TEST_CASE("slim triangles") {
    auto disk = PlanarDomain::disk();
    DensityField f(disk);
    auto oracle = make_exact_oracle(disk);

    SECTION("degenerate triangle") {
        Path p;
        p.t = {0.0, 1.0};
        p.z = {cplx(0.2, 0.1), cplx(0.2, 0.1)};
        CHECK(slim_check(p, p, p, oracle) == 0.0);
    }

    SECTION("near-ideal disk triangle is slim and stable") {
        cplx a = 0.99 * unit_dir(0);
        cplx b = 0.99 * unit_dir(2 * kPi / 3);
        cplx c = 0.99 * unit_dir(-2 * kPi / 3);
        auto t = build_triangle(disk, f, oracle, a, b, c, 0.01);
        double d1 = slim_check(t.alpha, t.beta, t.gamma, oracle, 96);
        double d2 = slim_check(t.alpha, t.beta, t.gamma, oracle, 192);
        CHECK(d1 > 0);
        CHECK(d1 == Catch::Approx(d2).epsilon(0.05));
        // Curvature -4 halves the classical slimness constant of H^2.
        CHECK(d1 < 1.0);
    }

    SECTION("endpoint mismatch is rejected") {
        auto t = build_triangle(disk, f, oracle, cplx(0.1, 0), cplx(0.5, 0), cplx(0, 0.5), 0.01);
        CHECK_THROWS_AS(slim_check(t.beta, t.alpha, t.gamma, oracle), invalid_parameter);
    }

    SECTION("annulus core triangles fatten as s shrinks") {
        double delta_by_s[2];
        double svals[2] = {0.5, 0.2};
        for (int i = 0; i < 2; ++i) {
            double s = svals[i];
            auto ann = PlanarDomain::annulus(s);
            DensityField fa(ann);
            auto oa = make_exact_oracle(ann);
            double r = std::exp(-s / 2.0);
            cplx a = r * unit_dir(0), b = r * unit_dir(2 * kPi / 3), c = r * unit_dir(-2 * kPi / 3);
            auto t = build_triangle(ann, fa, oa, a, b, c, 0.05);
            delta_by_s[i] = slim_check(t.alpha, t.beta, t.gamma, oa, 96);
        }
        CHECK(delta_by_s[1] > delta_by_s[0]);
    }
}

TEST_CASE("rips scan cross-checks the hyperbolicity constants") {
    auto disk = PlanarDomain::disk();
    DensityField f(disk);
    auto oracle = make_exact_oracle(disk);

    CHECK(rips_scan(disk, f, oracle, 0.05, {}).slim_deltas.empty());

    std::mt19937 rng(0);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    std::vector<std::array<cplx, 3>> triples;
    while (triples.size() < 12) {
        cplx a(u(rng), u(rng)), b(u(rng), u(rng)), c(u(rng), u(rng));
        if (!disk.contains(a) || !disk.contains(b) || !disk.contains(c)) continue;
        if (std::abs(a - b) < 0.1 || std::abs(b - c) < 0.1 || std::abs(a - c) < 0.1) continue;
        triples.push_back({a, b, c});
    }
    auto res = rips_scan(disk, f, oracle, 0.05, triples);
    CHECK(res.slim_deltas.size() == triples.size());
    CHECK(res.slack_slim >= -1e-3);
    CHECK(res.slack_delta >= -1e-3);
}

TEST_CASE("near-geodesic Gromov product bound") {
    // (sigma(0)|sigma(T))_z <= K(z, sigma) + 3 kappa / 2 for certified
    // (1,kappa)-almost-geodesics.
    auto disk = PlanarDomain::disk();
    DensityField f(disk);
    auto oracle = make_exact_oracle(disk);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    double kappa = 0.05;
    for (int trial = 0; trial < 20; ++trial) {
        cplx a(u(rng), u(rng)), b(u(rng), u(rng)), z(u(rng), u(rng));
        if (!disk.contains(a) || !disk.contains(b) || !disk.contains(z) || a == b) continue;
        auto g = construct_almost_geodesic(disk, f, oracle, a, b, kappa);
        REQUIRE(g.certificate.verdict == Verdict::Pass);
        double product = gromov_product(oracle(z, a).value, oracle(z, b).value,
                                        oracle(a, b).value);
        double dist_to_curve = std::numeric_limits<double>::infinity();
        for (cplx p : g.path.z) dist_to_curve = std::min(dist_to_curve, oracle(z, p).value);
        CHECK(product <= dist_to_curve + 1.5 * kappa + 1e-6);
    }
}

TEST_CASE("lattice qi experiment smoke run") {
    PdeOptions pde;
    pde.tolerance = 1e-7;
    auto res = lattice_qi_experiment(0.25, cplx(0.5, 0.5), {2}, 1.0 / 12, pde);
    REQUIRE(res.rows.size() == 1);
    const auto& row = res.rows[0];
    CHECK(row.points == 25);
    CHECK(row.c2 > 0);
    CHECK(row.c1_prime > 0);
    CHECK(row.c1_prime <= row.c2 + 1e-12);
    CHECK(row.max_upper_ratio <= 1.05);
    CHECK(row.delta_hat > 0);

    CHECK_THROWS_AS(lattice_qi_experiment(0.25, cplx(0, 0), {2}, 1.0 / 12), invalid_parameter);
}

TEST_CASE("lattice unit steps and translation invariance") {
    PdeOptions pde;
    pde.tolerance = 1e-7;
    auto res = lattice_qi_experiment(0.25, cplx(0.5, 0.5), {2}, 1.0 / 12, pde);
    const auto& row = res.rows[0];
    // K(F(0,0), F(1,0)) <= C2 with equality at the symmetric base point.
    CHECK(row.k_unit_x <= row.c2 + 1e-12);
    CHECK(row.k_unit_x == Catch::Approx(row.c2).epsilon(0.03));
    CHECK(row.k_unit_y == Catch::Approx(row.k_unit_x).epsilon(0.03));

    // Independent check of the translation invariance the experiment uses:
    // distances from shifted sources agree within the numeric tolerance.
    auto lat = PlanarDomain::lattice_complement(0.25);
    auto raster = lat.rasterize(1.0 / 12, cplx(-7, -7), cplx(8, 8));
    auto field = solve_density_pde(raster, pde);
    auto lambda = [&](cplx p) { return field(p); };
    cplx z0(0.5, 0.5);
    auto t0 = dijkstra_field(raster, lambda, z0);
    auto t1 = dijkstra_field(raster, lambda, z0 + cplx(1, 0));
    const RasterMask& m = raster.mask();
    for (cplx delta : {cplx(2, 1), cplx(-1, 3), cplx(0, -2)}) {
        int i, j, i2, j2;
        m.locate(z0 + delta, i, j);
        m.locate(z0 + cplx(1, 0) + delta, i2, j2);
        double a = t0.dist[m.index(i, j)];
        double b = t1.dist[m.index(i2, j2)];
        CHECK(a == Catch::Approx(b).epsilon(0.03));
    }
}
