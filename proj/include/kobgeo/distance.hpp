#pragma once

#include <queue>

#include "kobgeo/density.hpp"
#include "kobgeo/domain.hpp"

namespace kobgeo {

// -- closed-form distances -----------------------------------------------------

inline double disk_distance(cplx center, double radius, cplx z, cplx w) {
    cplx u = (z - center) / radius, v = (w - center) / radius;
    return std::atanh(std::abs((u - v) / (1.0 - std::conj(u) * v)));
}

inline double half_plane_distance(cplx z, cplx w) {
    return std::asinh(std::abs(z - w) / (2.0 * std::sqrt(z.imag() * w.imag())));
}

/// Distance in the vertical strip {-s < Re z < 0}, computed through the
/// half-plane image of exp(i pi (z+s)/s) in a form that never forms the
/// exponentials themselves: K = asinh sqrt(|sinh((g(z)-g(w))/2)|^2 /
/// (sin Im g(z) sin Im g(w))).
inline double strip_distance(double s, cplx z, cplx w) {
    cplx x = cplx(0, kPi / (2.0 * s)) * (z - w);  // (g(z)-g(w))/2
    double a = kPi * (z.real() + s) / s;          // Im g(z) in (0, pi)
    double b = kPi * (w.real() + s) / s;
    double sines = std::sin(a) * std::sin(b);
    if (std::abs(x.real()) > 300.0) {
        return std::abs(x.real()) + 0.5 * std::log(1.0 / sines);
    }
    double sh2 = std::norm(std::sinh(x));
    return std::asinh(std::sqrt(sh2 / sines));
}

/// Minimum over deck translates; the window grows while its edge attains the
/// minimum.
inline double min_over_lifts(const std::function<double(long)>& lift_distance, int start_window = 3,
                             long* best_index = nullptr) {
    long hi = start_window;
    long arg = 0;
    double best = lift_distance(0);
    for (long k = 1; k <= hi; ++k)
        for (long sgn : {1L, -1L}) {
            double d = lift_distance(sgn * k);
            if (d < best) {
                best = d;
                arg = sgn * k;
            }
        }
    while (std::abs(arg) == hi) {
        long new_hi = hi + 2;
        for (long k = hi + 1; k <= new_hi; ++k)
            for (long sgn : {1L, -1L}) {
                double d = lift_distance(sgn * k);
                if (d < best) {
                    best = d;
                    arg = sgn * k;
                }
            }
        hi = new_hi;
        if (hi > 1024) break;
    }
    if (best_index) *best_index = arg;
    return best;
}

/// Annulus A_s: lift through the covering exp : {-s < Re < 0} -> A_s and
/// minimize over deck translates w + 2 pi i k.
inline double annulus_distance(double s, cplx z, cplx w, long* best_k = nullptr) {
    cplx lz = std::log(z), lw = std::log(w);
    return min_over_lifts(
        [&](long k) { return strip_distance(s, lz, lw + cplx(0, 2.0 * kPi * k)); }, 3, best_k);
}

/// Punctured disk: lift through exp(i w) : {Im w > 0} -> D \ {0}.
inline double punctured_disk_distance(cplx z, cplx w, long* best_k = nullptr) {
    cplx lz = cplx(std::arg(z), -std::log(std::abs(z)));
    cplx lw = cplx(std::arg(w), -std::log(std::abs(w)));
    return min_over_lifts(
        [&](long k) { return half_plane_distance(lz, lw + cplx(2.0 * kPi * k, 0)); }, 3, best_k);
}

inline bool has_exact_distance(const PlanarDomain& dom) {
    DomainKind k = dom.kind() == DomainKind::Raster ? dom.source_kind() : dom.kind();
    return has_closed_form_density(k);
}

/// Kobayashi distance for kinds with a closed form (model kinds and rasters
/// sampled from them). Throws otherwise.
inline double exact_distance(const PlanarDomain& dom, cplx z, cplx w) {
    DomainKind k = dom.kind() == DomainKind::Raster ? dom.source_kind() : dom.kind();
    switch (k) {
        case DomainKind::Disk: return disk_distance(dom.disk_center(), dom.disk_radius(), z, w);
        case DomainKind::HalfPlane: return half_plane_distance(z, w);
        case DomainKind::Strip: return strip_distance(dom.modulus(), z, w);
        case DomainKind::Annulus: return annulus_distance(dom.modulus(), z, w);
        case DomainKind::PuncturedDisk: return punctured_disk_distance(z, w);
        default: throw query_error("exact_distance: no closed form for this domain kind");
    }
}

// -- numeric distances on rasters -----------------------------------------------

/// Single-source shortest-path field on the 8-connected inside-cell graph,
/// edge weight lambda(midpoint) * |edge|.
struct SingleSourceField {
    std::vector<double> dist;          // per cell; +inf if unreachable
    std::vector<std::int32_t> parent;  // cell index, -1 at source/unreachable
    cplx source;
    std::size_t source_cell = 0;
};

template <class Lambda>
SingleSourceField dijkstra_field(const PlanarDomain& dom, Lambda&& lambda, cplx source) {
    const RasterMask& m = dom.mask();
    if (!dom.contains(source)) throw query_error("dijkstra: source outside domain");
    int si, sj;
    m.locate(source, si, sj);
    if (!m.in_grid(si, sj) || !m.at(si, sj)) throw query_error("dijkstra: source cell not inside");

    const double kInf = std::numeric_limits<double>::infinity();
    SingleSourceField f;
    f.dist.assign(m.size(), kInf);
    f.parent.assign(m.size(), -1);
    f.source = source;
    f.source_cell = m.index(si, sj);

    using QE = std::pair<double, std::uint32_t>;
    std::priority_queue<QE, std::vector<QE>, std::greater<QE>> heap;
    f.dist[f.source_cell] = 0;
    heap.push({0.0, static_cast<std::uint32_t>(f.source_cell)});

    const int di[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    const int dj[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    const double h = m.spacing();
    const double len[8] = {h, h, h, h, h * std::sqrt(2.0), h * std::sqrt(2.0), h * std::sqrt(2.0),
                           h * std::sqrt(2.0)};
    while (!heap.empty()) {
        auto [d, k] = heap.top();
        heap.pop();
        if (d > f.dist[k]) continue;
        int i = static_cast<int>(k % m.nx()), j = static_cast<int>(k / m.nx());
        cplx ck = m.center(i, j);
        for (int t = 0; t < 8; ++t) {
            int a = i + di[t], b = j + dj[t];
            if (!m.in_grid(a, b) || !m.at(a, b)) continue;
            std::size_t kk = m.index(a, b);
            cplx cn = m.center(a, b);
            double wgt = lambda(0.5 * (ck + cn)) * len[t];
            double nd = d + wgt;
            if (nd < f.dist[kk]) {
                f.dist[kk] = nd;
                f.parent[kk] = static_cast<std::int32_t>(k);
                heap.push({nd, static_cast<std::uint32_t>(kk)});
            }
        }
    }
    return f;
}

/// Cell-center polyline from the source to the cell containing `target`;
/// empty if unreachable.
inline std::vector<cplx> extract_polyline(const PlanarDomain& dom, const SingleSourceField& f,
                                          cplx target) {
    const RasterMask& m = dom.mask();
    int ti, tj;
    m.locate(target, ti, tj);
    if (!m.in_grid(ti, tj) || !m.at(ti, tj)) throw query_error("extract_polyline: target cell not inside");
    std::size_t k = m.index(ti, tj);
    if (std::isinf(f.dist[k])) return {};
    std::vector<cplx> rev;
    rev.push_back(target);
    while (true) {
        int i = static_cast<int>(k % m.nx()), j = static_cast<int>(k / m.nx());
        rev.push_back(m.center(i, j));
        if (f.parent[k] < 0) break;
        k = static_cast<std::size_t>(f.parent[k]);
    }
    rev.push_back(f.source);
    std::vector<cplx> out(rev.rbegin(), rev.rend());
    return out;
}

/// Fixed 4-point midpoint quadrature of the segment's Kobayashi length.
template <class Lambda>
double segment_length(Lambda&& lambda, cplx a, cplx b, int pts = 4) {
    double total = 0;
    cplx d = b - a;
    double len = std::abs(d);
    for (int q = 0; q < pts; ++q) total += lambda(a + d * ((q + 0.5) / pts));
    return total / pts * len;
}

template <class Lambda>
double polyline_length(Lambda&& lambda, const std::vector<cplx>& p, int pts = 4) {
    double total = 0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        total += segment_length(lambda, p[i], p[i + 1], pts);
    return total;
}

inline bool segment_in_domain(const PlanarDomain& dom, cplx a, cplx b, double probe_step) {
    double len = std::abs(b - a);
    int n = std::max(2, static_cast<int>(std::ceil(len / probe_step)) + 1);
    for (int q = 0; q <= n; ++q) {
        cplx p = a + (b - a) * (static_cast<double>(q) / n);
        if (!dom.contains(p)) return false;
    }
    return true;
}

struct RelaxOptions {
    double step_fraction = 0.25;    // move size as a fraction of the spacing
    double rel_improvement = 1e-7;  // sweep stop threshold
    int max_sweeps = 400;
};

/// Endpoint-fixed coordinate descent of the interior knots over compass moves
/// of size h * step_fraction. Moves that would exit the domain are rejected.
template <class Lambda>
void relax_polyline(const PlanarDomain& dom, Lambda&& lambda, std::vector<cplx>& p,
                    const RelaxOptions& opt = {}) {
    if (p.size() < 3) return;
    const double h = dom.mask().spacing();
    const double step = h * opt.step_fraction;
    const double probe = h * 0.5;
    double total = polyline_length(lambda, p);
    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        double before = total;
        for (std::size_t i = 1; i + 1 < p.size(); ++i) {
            double local = segment_length(lambda, p[i - 1], p[i]) +
                           segment_length(lambda, p[i], p[i + 1]);
            cplx best = p[i];
            double best_local = local;
            for (int t = 0; t < 8; ++t) {
                cplx cand = p[i] + step * unit_dir(2 * kPi * t / 8);
                if (!dom.contains(cand)) continue;
                if (!segment_in_domain(dom, p[i - 1], cand, probe) ||
                    !segment_in_domain(dom, cand, p[i + 1], probe))
                    continue;
                double cl = segment_length(lambda, p[i - 1], cand) +
                            segment_length(lambda, cand, p[i + 1]);
                if (cl < best_local) {
                    best_local = cl;
                    best = cand;
                }
            }
            if (best != p[i]) {
                total += best_local - local;
                p[i] = best;
            }
        }
        if (before - total < opt.rel_improvement * std::max(1.0, std::abs(total))) break;
    }
}

struct NumericDistance {
    double value = std::numeric_limits<double>::infinity();
    double error = 0;  // declared half-width heuristic
    std::vector<cplx> polyline;
    bool connected = true;
};

/// Grid-graph shortest path followed by local descent. `lambda` must be
/// evaluable on the whole raster (closed form or a solved DensityField).
template <class Lambda>
NumericDistance numeric_distance(const PlanarDomain& dom, Lambda&& lambda, cplx z, cplx w,
                                 const RelaxOptions& relax = {}) {
    if (!dom.contains(z) || !dom.contains(w)) throw query_error("numeric_distance: point outside domain");
    NumericDistance out;
    auto f = dijkstra_field(dom, lambda, z);
    out.polyline = extract_polyline(dom, f, w);
    if (out.polyline.empty()) {
        out.connected = false;
        return out;
    }
    relax_polyline(dom, lambda, out.polyline, relax);
    out.value = polyline_length(lambda, out.polyline, 8);
    double h = dom.mask().spacing();
    out.error = 0.005 * out.value + 2.0 * h;
    return out;
}

/// Dispatch: exact closed form when available, else the grid pipeline.
/// Raster domains in different mask components report +infinity.
template <class Lambda>
NumericDistance domain_distance(const PlanarDomain& dom, Lambda&& lambda, cplx z, cplx w) {
    NumericDistance out;
    if (has_exact_distance(dom)) {
        out.value = exact_distance(dom, z, w);
        out.error = 1e-12 * std::max(1.0, out.value);
        return out;
    }
    return numeric_distance(dom, lambda, z, w);
}

}  // namespace kobgeo
