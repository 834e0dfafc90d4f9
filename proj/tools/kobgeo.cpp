// kobgeo: scenario-driven experiments on the Kobayashi geometry of planar
// domains. `kobgeo run <config.json>` executes a scenario; the other
// subcommands generate a one-experiment config and run it through the same
// path, so outputs are identical to a hand-written scenario.

#include <CLI11.hpp>

#include <iostream>

#include "kobgeo/scenario.hpp"

namespace {

using kobgeo::njson;

njson parse_domain_arg(const std::string& text) {
    auto split = [](const std::string& s, char sep) {
        std::vector<std::string> parts;
        std::string cur;
        for (char c : s) {
            if (c == sep) {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        parts.push_back(cur);
        return parts;
    };
    auto colon = text.find(':');
    std::string kind = text.substr(0, colon);
    std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    njson d;
    if (kind == "disk") {
        d["kind"] = "disk";
        if (!args.empty()) {
            auto parts = split(args, ',');
            if (parts.size() != 3) throw kobgeo::config_error("disk spec: disk[:cx,cy,r]");
            d["center"] = {std::stod(parts[0]), std::stod(parts[1])};
            d["radius"] = std::stod(parts[2]);
        }
    } else if (kind == "half_plane" || kind == "punctured_disk") {
        d["kind"] = kind;
    } else if (kind == "strip" || kind == "annulus") {
        d["kind"] = kind;
        d["s"] = args.empty() ? 1.0 : std::stod(args);
    } else if (kind == "lattice") {
        d["kind"] = "lattice_complement";
        d["hole_radius"] = args.empty() ? 0.25 : std::stod(args);
    } else if (kind == "chained") {
        d["kind"] = "chained_annuli";
        std::vector<double> moduli;
        for (const std::string& part : split(args, ',')) moduli.push_back(std::stod(part));
        d["moduli"] = moduli;
    } else {
        throw kobgeo::config_error("unknown domain spec '" + text + "'");
    }
    return d;
}

njson parse_map_arg(const std::string& text) {
    auto colon = text.find(':');
    std::string kind = text.substr(0, colon);
    std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    std::vector<double> vals;
    std::string cur;
    for (char c : args + ",") {
        if (c == ',') {
            if (!cur.empty() && cur != "i" && cur != "1") vals.push_back(std::stod(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    njson m;
    m["kind"] = kind;
    if (kind == "disk_mobius") {
        if (vals.size() < 2) throw kobgeo::config_error("disk_mobius:ax,ay[,phi]");
        m["a"] = {vals[0], vals[1]};
        if (vals.size() > 2) m["phi"] = vals[2];
    } else if (kind == "disk_rotation" || kind == "annulus_rotation") {
        if (!vals.empty()) m["theta"] = vals[0];
        if (kind == "annulus_rotation" && vals.size() > 1) m["s"] = vals[1];
    } else if (kind == "lattice_translation") {
        m["step"] = args.empty() ? "1" : args;
    } else if (kind == "half_plane_affine") {
        if (vals.size() < 2) throw kobgeo::config_error("half_plane_affine:alpha,beta");
        m["alpha"] = vals[0];
        m["beta"] = vals[1];
    } else {
        throw kobgeo::config_error("unknown map spec '" + text + "'");
    }
    return m;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> vals;
    std::string cur;
    for (char c : text + ",") {
        if (c == ',') {
            if (!cur.empty()) vals.push_back(std::stod(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    return vals;
}

int run_config(const njson& config, const std::string& out_dir) {
    std::string text = config.dump(2) + "\n";
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream os(out_dir + "/scenario.json", std::ios::binary);
        os << text;
    }
    auto result = kobgeo::run_scenario_text(text, out_dir);
    if (!result.error.empty()) std::cerr << "kobgeo: " << result.error << "\n";
    for (const auto& a : result.artifacts)
        std::cout << std::filesystem::path(a.file).filename().string() << " "
                  << (a.ok ? "OK" : "FAILED") << "\n";
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kobgeo: Kobayashi geometry experiments on planar domains"};
    app.require_subcommand(1);

    std::string out_dir = "kobgeo_out";
    app.add_option("--out", out_dir, "output directory")->capture_default_str();

    std::string config_path, domain_arg = "disk", map_arg = "disk_rotation:1.0";
    std::string from_arg = "0,0", to_arg = "0.9,0", xi_arg = "1,0", eta_arg = "-1,0";
    std::string radii_arg = "2,4", s_arg = "0.5,0.2,0.1", box_arg = "2,4,8", base_arg;
    double h = 0, kappa = 0.05, radius = 0.2, hole = 0.25;
    int count = 9, npts = 24, n_iter = 60, seed = 0;

    auto* run = app.add_subcommand("run", "run a scenario config");
    run->add_option("config", config_path, "scenario JSON")->required();

    auto add_domain = [&](CLI::App* cmd) {
        cmd->add_option("--domain", domain_arg, "domain spec, e.g. disk | annulus:1 | lattice:0.25")
            ->capture_default_str();
    };
    auto* density = app.add_subcommand("density", "sample the conformal density");
    add_domain(density);
    density->add_option("--spacing", h, "raster spacing for PDE-backed kinds");

    auto* distance = app.add_subcommand("distance", "Kobayashi distance between two points");
    add_domain(distance);
    distance->add_option("--from", from_arg, "x,y")->capture_default_str();
    distance->add_option("--to", to_arg, "x,y")->capture_default_str();
    distance->add_option("--spacing", h, "raster spacing");

    auto* geodesic = app.add_subcommand("geodesic", "construct a (1,kappa)-almost-geodesic");
    add_domain(geodesic);
    geodesic->add_option("--from", from_arg, "x,y")->capture_default_str();
    geodesic->add_option("--to", to_arg, "x,y")->capture_default_str();
    geodesic->add_option("--kappa", kappa, "certificate kappa")->capture_default_str();
    geodesic->add_option("--spacing", h, "raster spacing");

    auto* delta = app.add_subcommand("delta", "four-point delta scan on sampled points");
    add_domain(delta);
    delta->add_option("--points", npts, "number of sample points")->capture_default_str();
    delta->add_option("--seed", seed, "sampling seed")->capture_default_str();

    auto* visibility = app.add_subcommand("visibility", "almost-geodesic visibility experiment");
    add_domain(visibility);
    visibility->add_option("--xi", xi_arg, "first boundary target x,y")->capture_default_str();
    visibility->add_option("--eta", eta_arg, "second boundary target x,y")->capture_default_str();
    visibility->add_option("--radius", radius, "target neighborhood radius")->capture_default_str();
    visibility->add_option("--kappa", kappa, "almost-geodesic kappa")->capture_default_str();
    visibility->add_option("--count", count, "number of curves")->capture_default_str();
    visibility->add_option("--base", base_arg, "base point x,y");

    auto* ends = app.add_subcommand("ends", "end-compactification tree");
    add_domain(ends);
    ends->add_option("--radii", radii_arg, "exhaustion radii r1,r2,...")->capture_default_str();
    ends->add_option("--spacing", h, "raster spacing");

    auto* orbit = app.add_subcommand("orbit", "iterate a holomorphic self-map");
    orbit->add_option("--map", map_arg, "map spec, e.g. disk_mobius:0.5,0")->capture_default_str();
    orbit->add_option("--base", base_arg, "base points x1,y1,x2,y2,...");
    orbit->add_option("--n", n_iter, "iterations")->capture_default_str();
    orbit->add_option("--spacing", h, "raster spacing (lattice maps)");

    auto* fatness = app.add_subcommand("fatness", "annulus fatness witnesses");
    fatness->add_option("--s", s_arg, "annulus moduli s1,s2,...")->capture_default_str();

    auto* lattice_qi = app.add_subcommand("lattice-qi", "lattice quasi-isometry experiment");
    lattice_qi->add_option("--hole", hole, "hole radius")->capture_default_str();
    lattice_qi->add_option("--radii", box_arg, "box radii R1,R2,...")->capture_default_str();
    lattice_qi->add_option("--base", base_arg, "base point x,y");
    lattice_qi->add_option("--spacing", h, "raster spacing");

    for (CLI::App* sc : app.get_subcommands([](const CLI::App*) { return true; }))
        sc->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            auto result = kobgeo::run_scenario(config_path, out_dir);
            if (!result.error.empty()) std::cerr << "kobgeo: " << result.error << "\n";
            for (const auto& a : result.artifacts)
                std::cout << std::filesystem::path(a.file).filename().string() << " "
                          << (a.ok ? "OK" : "FAILED") << "\n";
            return result.exit_code;
        }

        njson config;
        config["seed"] = seed;
        njson exp;
        if (density->parsed()) {
            config["domain"] = parse_domain_arg(domain_arg);
            exp["name"] = "density";
            if (h > 0) exp["h"] = h;
        } else if (distance->parsed()) {
            config["domain"] = parse_domain_arg(domain_arg);
            auto f = parse_list(from_arg), t = parse_list(to_arg);
            exp["name"] = "distance";
            exp["pairs"] = {{f[0], f[1], t[0], t[1]}};
            if (h > 0) exp["h"] = h;
        } else if (geodesic->parsed()) {
            config["domain"] = parse_domain_arg(domain_arg);
            auto f = parse_list(from_arg), t = parse_list(to_arg);
            exp["name"] = "geodesic";
            exp["from"] = {f[0], f[1]};
            exp["to"] = {t[0], t[1]};
            exp["kappa"] = kappa;
            if (h > 0) exp["h"] = h;
        } else if (delta->parsed()) {
            config["domain"] = parse_domain_arg(domain_arg);
            exp["name"] = "delta";
            exp["count"] = npts;
            exp["seed"] = seed;
        } else if (visibility->parsed()) {
            config["domain"] = parse_domain_arg(domain_arg);
            auto x = parse_list(xi_arg), e = parse_list(eta_arg);
            exp["name"] = "visibility";
            exp["xi"] = {x[0], x[1]};
            exp["eta"] = {e[0], e[1]};
            exp["radius"] = radius;
            exp["kappa"] = kappa;
            exp["count"] = count;
            if (!base_arg.empty()) {
                auto b = parse_list(base_arg);
                exp["base"] = {b[0], b[1]};
            }
        } else if (ends->parsed()) {
            config["domain"] = parse_domain_arg(domain_arg);
            exp["name"] = "ends";
            exp["radii"] = parse_list(radii_arg);
            if (h > 0) exp["h"] = h;
        } else if (orbit->parsed()) {
            config["domain"] = parse_domain_arg("disk");  // placeholder; map carries its domain
            exp["name"] = "orbit";
            exp["map"] = parse_map_arg(map_arg);
            njson bases = njson::array();
            if (!base_arg.empty()) {
                auto vals = parse_list(base_arg);
                for (std::size_t i = 0; i + 1 < vals.size(); i += 2)
                    bases.push_back({vals[i], vals[i + 1]});
            } else {
                bases.push_back({0.0, 0.0});
                bases.push_back({0.2, 0.1});
            }
            exp["bases"] = bases;
            exp["n"] = n_iter;
            if (h > 0) exp["h"] = h;
        } else if (fatness->parsed()) {
            config["domain"] = njson{{"kind", "annulus"}, {"s", 1.0}};
            exp["name"] = "fatness";
            exp["s_values"] = parse_list(s_arg);
        } else if (lattice_qi->parsed()) {
            config["domain"] = njson{{"kind", "lattice_complement"}, {"hole_radius", hole}};
            exp["name"] = "lattice_qi";
            exp["hole_radius"] = hole;
            njson radii = njson::array();
            for (double r : parse_list(box_arg)) radii.push_back(static_cast<int>(r));
            exp["box_radii"] = radii;
            if (!base_arg.empty()) {
                auto b = parse_list(base_arg);
                exp["base"] = {b[0], b[1]};
            }
            if (h > 0) exp["h"] = h;
        }
        config["experiments"] = njson::array({exp});
        return run_config(config, out_dir);
    } catch (const std::exception& ex) {
        std::cerr << "kobgeo: " << ex.what() << "\n";
        return 1;
    }
}
