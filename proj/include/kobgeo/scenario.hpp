#pragma once

#include <filesystem>
#include <json.hpp>
#include <map>
#include <sstream>

#include "kobgeo/dynamics.hpp"
#include "kobgeo/gromov.hpp"
#include "kobgeo/io.hpp"
#include "kobgeo/visibility.hpp"

namespace kobgeo {

using njson = nlohmann::json;

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void expect_keys(const njson& obj, const std::vector<std::string>& allowed,
                        const std::string& where) {
    if (!obj.is_object()) throw config_error(where + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw config_error(where + ": unknown key '" + it.key() + "'");
    }
}

inline cplx parse_point(const njson& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw config_error(where + ": expected [x, y]");
    return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace detail

inline PlanarDomain parse_domain(const njson& spec) {
    if (!spec.is_object() || !spec.contains("kind"))
        throw config_error("domain: missing 'kind'");
    std::string kind = spec["kind"].get<std::string>();
    if (kind == "disk") {
        detail::expect_keys(spec, {"kind", "center", "radius"}, "domain(disk)");
        cplx c = spec.contains("center") ? detail::parse_point(spec["center"], "disk.center")
                                         : cplx(0, 0);
        double r = spec.value("radius", 1.0);
        return PlanarDomain::disk(c, r);
    }
    if (kind == "half_plane") {
        detail::expect_keys(spec, {"kind"}, "domain(half_plane)");
        return PlanarDomain::half_plane();
    }
    if (kind == "strip") {
        detail::expect_keys(spec, {"kind", "s"}, "domain(strip)");
        return PlanarDomain::strip(spec.value("s", 1.0));
    }
    if (kind == "annulus") {
        detail::expect_keys(spec, {"kind", "s"}, "domain(annulus)");
        return PlanarDomain::annulus(spec.value("s", 1.0));
    }
    if (kind == "punctured_disk") {
        detail::expect_keys(spec, {"kind"}, "domain(punctured_disk)");
        return PlanarDomain::punctured_disk();
    }
    if (kind == "lattice_complement") {
        detail::expect_keys(spec, {"kind", "hole_radius"}, "domain(lattice_complement)");
        return PlanarDomain::lattice_complement(spec.value("hole_radius", 0.25));
    }
    if (kind == "chained_annuli") {
        detail::expect_keys(spec, {"kind", "moduli"}, "domain(chained_annuli)");
        if (!spec.contains("moduli")) throw config_error("chained_annuli: missing 'moduli'");
        return PlanarDomain::chained_annuli(spec["moduli"].get<std::vector<double>>());
    }
    throw config_error("domain: unknown kind '" + kind + "'");
}

inline MapSpec parse_map(const njson& spec) {
    if (!spec.is_object() || !spec.contains("kind")) throw config_error("map: missing 'kind'");
    std::string kind = spec["kind"].get<std::string>();
    if (kind == "disk_mobius") {
        detail::expect_keys(spec, {"kind", "a", "phi"}, "map(disk_mobius)");
        return MapSpec::disk_mobius(detail::parse_point(spec.at("a"), "map.a"),
                                    spec.value("phi", 0.0));
    }
    if (kind == "disk_rotation") {
        detail::expect_keys(spec, {"kind", "theta"}, "map(disk_rotation)");
        return MapSpec::disk_rotation(spec.value("theta", 1.0));
    }
    if (kind == "annulus_rotation") {
        detail::expect_keys(spec, {"kind", "theta", "s"}, "map(annulus_rotation)");
        return MapSpec::annulus_rotation(spec.value("theta", 1.0), spec.value("s", 1.0));
    }
    if (kind == "lattice_translation") {
        detail::expect_keys(spec, {"kind", "step", "hole_radius"}, "map(lattice_translation)");
        std::string step = spec.value("step", "1");
        return MapSpec::lattice_translation(step == "i" ? cplx(0, 1) : cplx(1, 0),
                                            spec.value("hole_radius", 0.25));
    }
    if (kind == "half_plane_affine") {
        detail::expect_keys(spec, {"kind", "alpha", "beta"}, "map(half_plane_affine)");
        return MapSpec::half_plane_affine(spec.value("alpha", 1.0), spec.value("beta", 0.0));
    }
    throw config_error("map: unknown kind '" + kind + "'");
}

struct Artifact {
    std::string file;
    bool ok = true;
    std::string note;
};

struct ScenarioContext {
    PlanarDomain domain = PlanarDomain::disk();
    std::string out_dir;
    unsigned seed = 0;
    njson tolerances;

    // Lazily rasterized + solved density for kinds without a closed form.
    std::optional<PlanarDomain> raster;
    std::optional<DensityField> field;

    double tol(const std::string& key, double fallback) const {
        if (tolerances.contains(key)) return tolerances[key].get<double>();
        return fallback;
    }

    const PlanarDomain& raster_domain(double h) {
        if (!raster) {
            if (domain.kind() == DomainKind::Raster) raster = domain;
            else raster = domain.rasterize(h);
        }
        return *raster;
    }

    const DensityField& density(double h) {
        if (!field) {
            DomainKind k = domain.kind() == DomainKind::Raster ? domain.source_kind()
                                                               : domain.kind();
            if (has_closed_form_density(k) && domain.kind() != DomainKind::Raster) {
                field.emplace(domain);
            } else {
                PdeOptions opt;
                opt.tolerance = tol("pde_residual", 1e-8);
                field.emplace(solve_density_pde(raster_domain(h), opt));
            }
        }
        return *field;
    }

    DistanceOracle oracle(double h) {
        if (has_exact_distance(domain)) return make_exact_oracle(domain);
        const DensityField& f = density(h);
        return make_grid_oracle(raster_domain(h), f);
    }

    std::function<double(cplx, cplx)> distance_fn(double h) {
        auto o = oracle(h);
        return [o](cplx a, cplx b) { return o(a, b).value; };
    }
};

using ExperimentFn = std::function<std::vector<Artifact>(ScenarioContext&, const njson&,
                                                         const std::string& prefix)>;

namespace experiments {

/// Nearest-hole exterior bound 1/(2 d log(d / r_hole)): a Schwarz-Pick lower
/// bound for domains avoiding a round hole (lattice complement, chained
/// annuli).
inline double hole_lower_bound(const PlanarDomain& dom, cplx z) {
    DomainKind k = dom.kind() == DomainKind::Raster ? dom.source_kind() : dom.kind();
    cplx center;
    double r = 0;
    if (k == DomainKind::LatticeComplement) {
        center = PlanarDomain::nearest_lattice_point(z);
        r = dom.hole_radius();
    } else if (k == DomainKind::ChainedAnnuli) {
        double best = 1e300;
        for (std::size_t n = 0; n < dom.moduli().size(); ++n) {
            cplx c(PlanarDomain::chain_center(n), 0);
            if (std::abs(z - c) < best) {
                best = std::abs(z - c);
                center = c;
                r = std::exp(-dom.moduli()[n]);
            }
        }
    } else {
        return 0;
    }
    double d = std::abs(z - center);
    if (d <= r) return 0;
    return 1.0 / (2.0 * d * std::log(d / r));
}

inline std::vector<Artifact> density(ScenarioContext& ctx, const njson& p,
                                     const std::string& prefix) {
    detail::expect_keys(p, {"name", "h", "grid"}, "density");
    double h = p.value("h", 1.0 / 64);
    int grid = p.value("grid", 128);
    const DensityField& f = ctx.density(h);
    const PlanarDomain& dom = f.mode() == DensityMode::PdeGrid ? ctx.raster_domain(h) : ctx.domain;
    auto [lo, hi] = dom.default_window();

    std::vector<std::vector<std::string>> rows;
    std::vector<double> logs;
    std::vector<std::pair<int, int>> cells;
    for (int j = 0; j < grid; ++j)
        for (int i = 0; i < grid; ++i) {
            cplx z(lo.real() + (hi.real() - lo.real()) * (i + 0.5) / grid,
                   lo.imag() + (hi.imag() - lo.imag()) * (j + 0.5) / grid);
            if (!dom.contains(z)) continue;
            double lam = f(z);
            std::vector<std::string> row = {fmt_num(z.real()), fmt_num(z.imag()), fmt_num(lam)};
            double lower = hole_lower_bound(dom, z);
            if (lower > 0) {
                row.push_back(fmt_num(lower));
                row.push_back(fmt_num(1.0 / dom.clearance(z)));
            }
            rows.push_back(std::move(row));
            logs.push_back(std::log(lam));
            cells.emplace_back(i, j);
        }
    bool sandwich = dom.source_kind() == DomainKind::LatticeComplement ||
                    dom.source_kind() == DomainKind::ChainedAnnuli;
    std::vector<std::string> header = {"x", "y", "lambda"};
    if (sandwich) {
        header.push_back("lower_schwarz_pick");
        header.push_back("upper_inv_delta");
    }
    std::string csv = ctx.out_dir + "/" + prefix + "density.csv";
    write_csv(csv, header, rows);

    // Grayscale heatmap of log lambda.
    RasterMask heat(grid, grid, lo, std::max(hi.real() - lo.real(), hi.imag() - lo.imag()) / grid);
    double mn = 1e300, mx = -1e300;
    for (double v : logs) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    std::string pgm = ctx.out_dir + "/" + prefix + "density.pgm";
    {
        std::ofstream os(pgm, std::ios::binary);
        os << "P5\n" << grid << " " << grid << "\n255\n";
        std::vector<unsigned char> img(static_cast<std::size_t>(grid) * grid, 0);
        for (std::size_t k = 0; k < cells.size(); ++k) {
            double g = mx > mn ? (logs[k] - mn) / (mx - mn) : 0.5;
            img[static_cast<std::size_t>(grid - 1 - cells[k].second) * grid + cells[k].first] =
                static_cast<unsigned char>(35 + 220 * g);
        }
        os.write(reinterpret_cast<const char*>(img.data()), img.size());
    }
    return {{csv, true, ""}, {pgm, true, ""}};
}

inline std::vector<Artifact> distance(ScenarioContext& ctx, const njson& p,
                                      const std::string& prefix) {
    detail::expect_keys(p, {"name", "pairs", "h"}, "distance");
    double h = p.value("h", 1.0 / 64);
    std::vector<std::vector<std::string>> rows;
    for (const njson& pr : p.at("pairs")) {
        if (!pr.is_array() || pr.size() != 4) throw config_error("distance: pair must be [x1,y1,x2,y2]");
        cplx a(pr[0].get<double>(), pr[1].get<double>());
        cplx b(pr[2].get<double>(), pr[3].get<double>());
        DistEst d = ctx.oracle(h)(a, b);
        rows.push_back({fmt_num(a.real()), fmt_num(a.imag()), fmt_num(b.real()),
                        fmt_num(b.imag()), fmt_num(d.value), fmt_num(d.error)});
    }
    std::string csv = ctx.out_dir + "/" + prefix + "distance.csv";
    write_csv(csv, {"x1", "y1", "x2", "y2", "distance", "error"}, rows);
    return {{csv, true, ""}};
}

inline std::vector<Artifact> geodesic(ScenarioContext& ctx, const njson& p,
                                      const std::string& prefix) {
    detail::expect_keys(p, {"name", "from", "to", "kappa", "h"}, "geodesic");
    cplx a = detail::parse_point(p.at("from"), "geodesic.from");
    cplx b = detail::parse_point(p.at("to"), "geodesic.to");
    double kappa = p.value("kappa", 0.05);
    double h = p.value("h", 1.0 / 64);
    const DensityField& f = ctx.density(h);
    const PlanarDomain& dom = f.mode() == DensityMode::PdeGrid ? ctx.raster_domain(h) : ctx.domain;
    ConstructOptions copt;
    if (!has_exact_distance(dom)) copt.grid_n = 12;  // per-query grid oracles are costly
    auto g = construct_almost_geodesic(dom, f, ctx.oracle(h), a, b, kappa, copt);

    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < g.path.knots(); ++i)
        rows.push_back({fmt_num(g.path.t[i]), fmt_num(g.path.z[i].real()),
                        fmt_num(g.path.z[i].imag())});
    std::string csv = ctx.out_dir + "/" + prefix + "geodesic.csv";
    write_csv(csv, {"t", "x", "y"}, rows);

    std::string cert_csv = ctx.out_dir + "/" + prefix + "geodesic_certificate.csv";
    write_csv(cert_csv,
              {"lambda", "kappa", "grid_n", "max_violation", "max_speed", "length", "verdict"},
              {{fmt_num(g.certificate.lambda), fmt_num(g.certificate.kappa),
                std::to_string(g.certificate.grid_n), fmt_num(g.certificate.max_violation),
                fmt_num(g.certificate.max_speed), fmt_num(g.length),
                verdict_name(g.certificate.verdict)}});

    auto [lo, hi] = dom.default_window();
    SvgCanvas svg(lo, hi);
    for (cplx bp : dom.boundary_points(720)) svg.dot(bp, 1.0, "#888888");
    svg.polyline(g.path.z, "#c62828", 1.5);
    svg.dot(a, 3.0, "#1565c0");
    svg.dot(b, 3.0, "#1565c0");
    std::string svg_path = ctx.out_dir + "/" + prefix + "geodesic.svg";
    svg.save(svg_path);
    return {{csv, true, ""}, {cert_csv, true, ""}, {svg_path, true, ""}};
}

inline std::vector<Artifact> delta(ScenarioContext& ctx, const njson& p,
                                   const std::string& prefix) {
    detail::expect_keys(p, {"name", "points", "count", "seed"}, "delta");
    std::vector<cplx> pts;
    if (p.contains("points")) {
        for (const njson& q : p["points"]) pts.push_back(detail::parse_point(q, "delta.points"));
    } else {
        int count = p.value("count", 24);
        std::mt19937 rng(p.value("seed", ctx.seed));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        auto [lo, hi] = ctx.domain.default_window();
        while (static_cast<int>(pts.size()) < count) {
            cplx z(lo.real() + (hi.real() - lo.real()) * u(rng),
                   lo.imag() + (hi.imag() - lo.imag()) * u(rng));
            if (ctx.domain.contains(z)) pts.push_back(z);
        }
    }
    std::size_t n = pts.size();
    std::vector<double> D(n * n, 0.0);
    if (has_exact_distance(ctx.domain)) {
        auto o = ctx.oracle(p.value("h", 1.0 / 64));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                D[i * n + j] = D[j * n + i] = o(pts[i], pts[j]).value;
    } else {
        // One shortest-path tree per point; entries are grid upper bounds,
        // symmetrized by averaging.
        double h = p.value("h", 1.0 / 32);
        const DensityField& f = ctx.density(h);
        const PlanarDomain& raster = ctx.raster_domain(h);
        const RasterMask& m = raster.mask();
        for (std::size_t i = 0; i < n; ++i) {
            auto tree = dijkstra_field(raster, [&f](cplx z) { return f(z); }, pts[i]);
            for (std::size_t j = 0; j < n; ++j) {
                int a, b;
                m.locate(pts[j], a, b);
                D[i * n + j] = tree.dist[m.index(a, b)];
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                double v = 0.5 * (D[i * n + j] + D[j * n + i]);
                D[i * n + j] = D[j * n + i] = v;
                D[i * n + i] = 0.0;
            }
    }
    auto rep = four_point_delta(D, n, &pts);

    std::string csv = ctx.out_dir + "/" + prefix + "delta.csv";
    if (!rep.enough_points) {
        write_csv(csv, {"points", "note"}, {{std::to_string(n), "insufficient points"}});
        return {{csv, true, "insufficient points"}};
    }
    write_csv(csv,
              {"points", "delta_hat", "o_x", "o_y", "a_x", "a_y", "b_x", "b_y", "c_x", "c_y",
               "p_ab", "p_bc", "p_ac"},
              {{std::to_string(n), fmt_num(rep.delta_hat), fmt_num(rep.witness.points[0].real()),
                fmt_num(rep.witness.points[0].imag()), fmt_num(rep.witness.points[1].real()),
                fmt_num(rep.witness.points[1].imag()), fmt_num(rep.witness.points[2].real()),
                fmt_num(rep.witness.points[2].imag()), fmt_num(rep.witness.points[3].real()),
                fmt_num(rep.witness.points[3].imag()), fmt_num(rep.witness.p_ab),
                fmt_num(rep.witness.p_bc), fmt_num(rep.witness.p_ac)}});

    // Witness overlay: sample points in gray, the witness quadruple marked.
    auto [lo, hi] = ctx.domain.default_window();
    SvgCanvas svg(lo, hi);
    for (cplx bp : ctx.domain.boundary_points(720)) svg.dot(bp, 1.0, "#888888");
    for (cplx z : pts) svg.dot(z, 2.0, "#90a4ae");
    const char* colors[4] = {"#c62828", "#1565c0", "#2e7d32", "#6a1b9a"};
    for (int k = 0; k < 4; ++k) svg.dot(rep.witness.points[k], 4.0, colors[k]);
    std::string svg_path = ctx.out_dir + "/" + prefix + "delta_witness.svg";
    svg.save(svg_path);
    return {{csv, true, ""}, {svg_path, true, ""}};
}

inline std::vector<Artifact> visibility(ScenarioContext& ctx, const njson& p,
                                        const std::string& prefix) {
    detail::expect_keys(p, {"name", "xi", "eta", "radius", "kappa", "count", "base", "h"},
                        "visibility");
    VisibilityTarget xi{detail::parse_point(p.at("xi"), "visibility.xi"),
                        p.value("radius", 0.2)};
    VisibilityTarget eta{detail::parse_point(p.at("eta"), "visibility.eta"),
                         p.value("radius", 0.2)};
    double kappa = p.value("kappa", 0.05);
    int count = p.value("count", 9);
    cplx base = p.contains("base") ? detail::parse_point(p["base"], "visibility.base")
                                   : cplx(0, 0);
    double h = p.value("h", 1.0 / 64);
    const DensityField& f = ctx.density(h);
    const PlanarDomain& dom = f.mode() == DensityMode::PdeGrid ? ctx.raster_domain(h) : ctx.domain;
    auto stats = visibility_experiment(dom, f, ctx.oracle(h), xi, eta, kappa, count, base);

    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < stats.m.size(); ++i)
        rows.push_back({std::to_string(i), fmt_num(stats.m[i]),
                        verdict_name(stats.side_verdicts[i])});
    std::string csv = ctx.out_dir + "/" + prefix + "visibility.csv";
    write_csv(csv, {"i", "m_i", "certificate"}, rows);
    std::string sum = ctx.out_dir + "/" + prefix + "visibility_summary.csv";
    write_csv(sum, {"sup_m", "consistent"},
              {{fmt_num(stats.sup_m), stats.consistent ? "yes" : "no"}});

    auto [lo, hi] = dom.default_window();
    SvgCanvas svg(lo, hi);
    for (cplx bp : dom.boundary_points(720)) svg.dot(bp, 1.0, "#888888");
    for (const Path& path : stats.bundle) svg.polyline(path.z, "#2e7d32", 1.0);
    svg.dot(base, 3.0, "#c62828");
    std::string svg_path = ctx.out_dir + "/" + prefix + "visibility.svg";
    svg.save(svg_path);
    return {{csv, true, ""}, {sum, true, ""}, {svg_path, true, ""}};
}

inline std::vector<Artifact> ends(ScenarioContext& ctx, const njson& p,
                                  const std::string& prefix) {
    detail::expect_keys(p, {"name", "radii", "h"}, "ends");
    double h = p.value("h", 1.0 / 16);
    std::vector<double> radii = p.at("radii").get<std::vector<double>>();
    const PlanarDomain& raster = ctx.raster_domain(h);
    auto tree = build_end_tree(raster, radii);

    std::vector<std::vector<std::string>> rows;
    for (std::size_t lvl = 0; lvl < tree.levels.size(); ++lvl)
        for (const EndComponent& c : tree.levels[lvl])
            rows.push_back({std::to_string(lvl), std::to_string(c.id), std::to_string(c.parent),
                            c.unbounded ? "1" : "0", std::to_string(c.cells)});
    std::string csv = ctx.out_dir + "/" + prefix + "ends.csv";
    write_csv(csv, {"level", "component", "parent", "unbounded", "cells"}, rows);

    // Nested outline.
    std::string txt = ctx.out_dir + "/" + prefix + "ends_outline.txt";
    {
        std::ofstream os(txt, std::ios::binary);
        os << "ends at truncation depth: " << count_ends(tree) << "\n";
        if (!tree.note.empty()) os << "note: " << tree.note << "\n";
        std::function<void(std::size_t, int, int)> walk = [&](std::size_t lvl, int id,
                                                              int indent) {
            const EndComponent& c = tree.levels[lvl][id];
            os << std::string(indent * 2, ' ') << "level " << lvl << " component " << id
               << (c.unbounded ? " (unbounded, " : " (bounded, ") << c.cells << " cells)\n";
            if (lvl + 1 < tree.levels.size())
                for (const EndComponent& child : tree.levels[lvl + 1])
                    if (child.parent == id) walk(lvl + 1, child.id, indent + 1);
        };
        for (const EndComponent& c : tree.levels.empty() ? std::vector<EndComponent>{}
                                                         : tree.levels[0])
            walk(0, c.id, 0);
    }
    std::string pgm = ctx.out_dir + "/" + prefix + "mask.pgm";
    raster.mask().write_pgm(pgm);
    return {{csv, true, ""}, {txt, true, ""}, {pgm, true, ""}};
}

inline std::vector<Artifact> orbit(ScenarioContext& ctx, const njson& p,
                                   const std::string& prefix) {
    detail::expect_keys(p, {"name", "map", "bases", "n", "h", "radii"}, "orbit");
    MapSpec map = parse_map(p.at("map"));
    int N = p.value("n", 60);
    std::vector<cplx> bases;
    if (p.contains("bases"))
        for (const njson& q : p["bases"]) bases.push_back(detail::parse_point(q, "orbit.bases"));
    if (bases.empty()) throw config_error("orbit: need 'bases'");

    PlanarDomain dom = map.domain();
    std::function<double(cplx, cplx)> dist;
    std::optional<EndTree> tree;
    std::optional<PlanarDomain> raster;
    std::optional<DensityField> field;
    std::optional<SingleSourceField> source;
    if (has_exact_distance(dom)) {
        dist = [dom](cplx a, cplx b) { return exact_distance(dom, a, b); };
    } else {
        double h = p.value("h", 1.0 / 10);
        double extent = std::abs(bases[0]) + N + 3.0;
        raster = dom.rasterize(h, bases[0] - cplx(extent, extent), bases[0] + cplx(extent, extent));
        PdeOptions pde;
        pde.tolerance = ctx.tol("pde_residual", 1e-7);
        field.emplace(solve_density_pde(*raster, pde));
        const DensityField* fp = &*field;
        source = dijkstra_field(*raster, [fp](cplx z) { return (*fp)(z); }, bases[0]);
        const RasterMask* mask = &raster->mask();
        const SingleSourceField* sp = &*source;
        dist = [mask, sp](cplx, cplx w) {
            int i, j;
            mask->locate(w, i, j);
            return sp->dist[mask->index(i, j)];
        };
        std::vector<double> radii = p.contains("radii")
                                        ? p["radii"].get<std::vector<double>>()
                                        : std::vector<double>{extent / 4, extent / 2,
                                                              3 * extent / 4};
        tree = build_end_tree(*raster, radii);
    }
    auto rep = orbit_report(map, bases, N, dist, tree ? &*tree : nullptr);

    std::vector<std::vector<std::string>> rows;
    for (int n = 1; n <= N; ++n)
        rows.push_back({std::to_string(n), fmt_num(rep.orbits[0][n].real()),
                        fmt_num(rep.orbits[0][n].imag()), fmt_num(rep.d[n - 1])});
    std::string csv = ctx.out_dir + "/" + prefix + "orbit.csv";
    write_csv(csv, {"n", "x", "y", "d_n"}, rows);

    std::string verdict;
    switch (rep.verdict) {
        case OrbitVerdict::RelativelyCompact: verdict = "relatively-compact"; break;
        case OrbitVerdict::ConvergesToBoundaryPoint: verdict = "converges-to-boundary-point"; break;
        case OrbitVerdict::ConvergesToEnd: verdict = "converges-to-end"; break;
        case OrbitVerdict::Diagnostic: verdict = "diagnostic"; break;
    }
    std::string records;
    for (std::size_t r : rep.records) records += (records.empty() ? "" : " ") + std::to_string(r);
    std::string sum = ctx.out_dir + "/" + prefix + "orbit_summary.csv";
    write_csv(sum, {"verdict", "limit_x", "limit_y", "limit_end", "record_times", "diagnostic"},
              {{verdict, fmt_num(rep.limit_point.real()), fmt_num(rep.limit_point.imag()),
                std::to_string(rep.limit_end), records, rep.diagnostic}});

    auto [lo, hi] = dom.default_window();
    SvgCanvas svg(lo, hi);
    for (cplx bp : dom.boundary_points(720)) svg.dot(bp, 1.0, "#888888");
    svg.polyline(rep.orbits[0], "#6a1b9a", 1.0);
    for (cplx z : rep.orbits[0]) svg.dot(z, 2.0, "#6a1b9a");
    std::string svg_path = ctx.out_dir + "/" + prefix + "orbit.svg";
    svg.save(svg_path);
    return {{csv, true, ""}, {sum, true, ""}, {svg_path, true, ""}};
}

inline std::vector<Artifact> fatness(ScenarioContext& ctx, const njson& p,
                                     const std::string& prefix) {
    detail::expect_keys(p, {"name", "s_values"}, "fatness");
    auto rows_data = annulus_fatness(p.at("s_values").get<std::vector<double>>());
    std::vector<std::vector<std::string>> rows;
    for (const FatnessRow& r : rows_data)
        rows.push_back({fmt_num(r.s), fmt_num(r.c), fmt_num(r.gap), fmt_num(r.predicted),
                        fmt_num(r.scan_delta), fmt_num(r.lift_check_error)});
    std::string csv = ctx.out_dir + "/" + prefix + "fatness.csv";
    write_csv(csv, {"s", "c", "gap", "predicted", "scan_delta", "lift_check_error"}, rows);
    return {{csv, true, ""}};
}

inline std::vector<Artifact> lattice_qi(ScenarioContext& ctx, const njson& p,
                                        const std::string& prefix) {
    detail::expect_keys(p, {"name", "hole_radius", "base", "box_radii", "h"}, "lattice_qi");
    double hole = p.value("hole_radius", 0.25);
    cplx base = p.contains("base") ? detail::parse_point(p["base"], "lattice_qi.base")
                                   : cplx(0.5, 0.5);
    std::vector<int> radii = p.contains("box_radii") ? p["box_radii"].get<std::vector<int>>()
                                                     : std::vector<int>{2, 4, 8};
    double h = p.value("h", 1.0 / 16);
    PdeOptions pde;
    pde.tolerance = ctx.tol("pde_residual", 1e-7);
    auto res = lattice_qi_experiment(hole, base, radii, h, pde);
    std::vector<std::vector<std::string>> rows;
    for (const LatticeQiRow& r : res.rows)
        rows.push_back({std::to_string(r.box_radius), std::to_string(r.points),
                        fmt_num(r.c1_prime), fmt_num(r.c2), fmt_num(r.max_upper_ratio),
                        fmt_num(r.delta_hat)});
    std::string csv = ctx.out_dir + "/" + prefix + "lattice_qi.csv";
    write_csv(csv, {"box_radius", "points", "c1_prime", "c2", "max_upper_ratio", "delta_hat"},
              rows);
    return {{csv, true, ""}};
}

inline std::vector<Artifact> goldilocks(ScenarioContext& ctx, const njson& p,
                                        const std::string& prefix) {
    detail::expect_keys(p, {"name", "x", "radius", "base", "levels", "h"}, "goldilocks");
    cplx x = detail::parse_point(p.at("x"), "goldilocks.x");
    double radius = p.value("radius", 0.3);
    cplx base = p.contains("base") ? detail::parse_point(p["base"], "goldilocks.base")
                                   : cplx(0, 0);
    int levels = p.value("levels", 12);
    double h = p.value("h", 1.0 / 64);
    const DensityField& f = ctx.density(h);
    const PlanarDomain& dom = f.mode() == DensityMode::PdeGrid ? ctx.raster_domain(h) : ctx.domain;
    auto rep = goldilocks_report(dom, f, ctx.distance_fn(h), x, radius, base, levels);

    std::vector<std::vector<std::string>> rows;
    for (const MRow& row : rep.m_table)
        rows.push_back({fmt_num(row.r), fmt_num(row.m_hat), std::to_string(row.samples)});
    std::string csv = ctx.out_dir + "/" + prefix + "goldilocks_m.csv";
    write_csv(csv, {"r", "m_hat", "samples"}, rows);
    std::string sum = ctx.out_dir + "/" + prefix + "goldilocks_summary.csv";
    write_csv(sum,
              {"alpha_M", "residual_M", "alpha_dist", "C_dist", "residual_dist", "condition1",
               "condition2", "note"},
              {{fmt_num(rep.m_fit.slope), fmt_num(rep.m_fit.residual),
                fmt_num(rep.dist_fit.slope), fmt_num(rep.dist_fit.intercept),
                fmt_num(rep.dist_fit.residual), verdict_name(rep.condition1),
                verdict_name(rep.condition2), rep.note}});
    return {{csv, true, ""}, {sum, true, ""}};
}

inline std::vector<Artifact> m_function_exp(ScenarioContext& ctx, const njson& p,
                                            const std::string& prefix) {
    detail::expect_keys(p, {"name", "center", "radius", "r_values", "h"}, "m_function");
    cplx center = detail::parse_point(p.at("center"), "m_function.center");
    double radius = p.value("radius", 0.3);
    auto r_values = p.at("r_values").get<std::vector<double>>();
    double h = p.value("h", 1.0 / 64);
    const DensityField& f = ctx.density(h);
    const PlanarDomain& dom = f.mode() == DensityMode::PdeGrid ? ctx.raster_domain(h) : ctx.domain;
    auto rows_data = m_function(dom, f, center, radius, r_values, ctx.seed);
    std::vector<std::vector<std::string>> rows;
    for (const MRow& r : rows_data)
        rows.push_back({fmt_num(r.r), fmt_num(r.m_hat), std::to_string(r.samples)});
    std::string csv = ctx.out_dir + "/" + prefix + "m_function.csv";
    write_csv(csv, {"r", "m_hat", "samples"}, rows);
    return {{csv, true, ""}};
}

inline std::vector<Artifact> rips(ScenarioContext& ctx, const njson& p,
                                  const std::string& prefix) {
    detail::expect_keys(p, {"name", "count", "kappa", "seed", "separation"}, "rips");
    int count = p.value("count", 20);
    double kappa = p.value("kappa", 0.05);
    double sep = p.value("separation", 0.1);
    std::mt19937 rng(p.value("seed", ctx.seed));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto [lo, hi] = ctx.domain.default_window();
    std::vector<std::array<cplx, 3>> triples;
    while (static_cast<int>(triples.size()) < count) {
        std::array<cplx, 3> t;
        bool ok = true;
        for (cplx& z : t) {
            z = cplx(lo.real() + (hi.real() - lo.real()) * u(rng),
                     lo.imag() + (hi.imag() - lo.imag()) * u(rng));
            if (!ctx.domain.contains(z)) ok = false;
        }
        if (!ok) continue;
        if (std::abs(t[0] - t[1]) < sep || std::abs(t[1] - t[2]) < sep ||
            std::abs(t[0] - t[2]) < sep)
            continue;
        triples.push_back(t);
    }
    const DensityField& f = ctx.density(1.0 / 64);
    auto res = rips_scan(ctx.domain, f, ctx.oracle(1.0 / 64), kappa, triples);

    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < res.slim_deltas.size(); ++i)
        rows.push_back({std::to_string(i), fmt_num(res.slim_deltas[i])});
    std::string csv = ctx.out_dir + "/" + prefix + "rips.csv";
    write_csv(csv, {"triangle", "slim_delta"}, rows);
    std::string sum = ctx.out_dir + "/" + prefix + "rips_summary.csv";
    write_csv(sum, {"slim_max", "delta4", "kappa", "slack_slim", "slack_delta"},
              {{fmt_num(res.slim_max), fmt_num(res.delta4), fmt_num(res.kappa),
                fmt_num(res.slack_slim), fmt_num(res.slack_delta)}});
    return {{csv, true, ""}, {sum, true, ""}};
}

}  // namespace experiments

inline const std::map<std::string, ExperimentFn>& experiment_registry() {
    static const std::map<std::string, ExperimentFn> reg = {
        {"density", experiments::density},
        {"distance", experiments::distance},
        {"geodesic", experiments::geodesic},
        {"delta", experiments::delta},
        {"visibility", experiments::visibility},
        {"ends", experiments::ends},
        {"orbit", experiments::orbit},
        {"fatness", experiments::fatness},
        {"lattice_qi", experiments::lattice_qi},
        {"goldilocks", experiments::goldilocks},
        {"m_function", experiments::m_function_exp},
        {"rips", experiments::rips},
    };
    return reg;
}

struct RunResult {
    int exit_code = 0;
    std::vector<Artifact> artifacts;
    std::string error;
};

/// Runs the experiments in order, writes one CSV (or more) per experiment
/// plus manifest.txt with the config hash. Exit 0 on success, 1 on a config
/// error, 2 on any experiment error; partial outputs stay, marked FAILED.
inline RunResult run_scenario_text(const std::string& config_text, const std::string& out_dir) {
    RunResult result;
    std::filesystem::create_directories(out_dir);
    std::string hash = fnv1a_hex(config_text);

    auto write_manifest = [&]() {
        std::ofstream os(out_dir + "/manifest.txt", std::ios::binary);
        os << "config_hash " << hash << "\n";
        for (const Artifact& a : result.artifacts)
            os << std::filesystem::path(a.file).filename().string() << " "
               << (a.ok ? "OK" : "FAILED") << (a.note.empty() ? "" : " " + a.note) << "\n";
    };

    njson config;
    ScenarioContext ctx;
    std::vector<njson> experiments_list;
    try {
        config = njson::parse(config_text);
        detail::expect_keys(config, {"domain", "seed", "experiments", "tolerances"}, "config");
        if (!config.contains("domain")) throw config_error("config: missing 'domain'");
        ctx.domain = parse_domain(config["domain"]);
        ctx.seed = config.value("seed", 0u);
        ctx.tolerances = config.value("tolerances", njson::object());
        ctx.out_dir = out_dir;
        if (config.contains("experiments")) {
            if (!config["experiments"].is_array())
                throw config_error("config: 'experiments' must be an array");
            for (const njson& e : config["experiments"]) {
                if (!e.is_object() || !e.contains("name"))
                    throw config_error("experiment: missing 'name'");
                std::string name = e["name"].get<std::string>();
                if (!experiment_registry().count(name))
                    throw config_error("experiment: unknown name '" + name + "'");
                experiments_list.push_back(e);
            }
        }
    } catch (const std::exception& ex) {
        result.exit_code = 1;
        result.error = ex.what();
        write_manifest();
        return result;
    }

    for (std::size_t i = 0; i < experiments_list.size(); ++i) {
        const njson& e = experiments_list[i];
        std::string name = e["name"].get<std::string>();
        char prefix[32];
        std::snprintf(prefix, sizeof(prefix), "%02zu_", i);
        try {
            auto arts = experiment_registry().at(name)(ctx, e, prefix);
            for (Artifact& a : arts) result.artifacts.push_back(std::move(a));
        } catch (const std::exception& ex) {
            result.artifacts.push_back({out_dir + "/" + prefix + name, false, ex.what()});
            result.exit_code = 2;
            if (result.error.empty()) result.error = name + ": " + ex.what();
        }
    }
    write_manifest();
    return result;
}

inline RunResult run_scenario(const std::string& config_path, const std::string& out_dir) {
    std::ifstream is(config_path, std::ios::binary);
    if (!is) {
        RunResult r;
        r.exit_code = 1;
        r.error = "cannot open config " + config_path;
        return r;
    }
    std::stringstream ss;
    ss << is.rdbuf();
    return run_scenario_text(ss.str(), out_dir);
}

}  // namespace kobgeo
