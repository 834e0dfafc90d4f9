#pragma once

#include <random>

#include "kobgeo/ends.hpp"
#include "kobgeo/paths.hpp"

namespace kobgeo {

enum class MapKind { DiskMobius, DiskRotation, AnnulusRotation, LatticeTranslation, HalfPlaneAffine };

/// Closed-form holomorphic self-map of one of the model domains. The self-map
/// property is re-verified on a sampled point cloud at construction.
struct MapSpec {
    MapKind kind = MapKind::DiskRotation;
    cplx mobius_a{0, 0};
    double rotation = 0;
    cplx step{1, 0};
    double affine_scale = 1, affine_shift = 0;
    double annulus_s = 1.0;
    double hole_radius = 0.25;

    static MapSpec disk_mobius(cplx a, double phi = 0) {
        if (!(std::abs(a) < 1)) throw invalid_parameter("disk_mobius: |a| must be < 1");
        MapSpec m;
        m.kind = MapKind::DiskMobius;
        m.mobius_a = a;
        m.rotation = phi;
        m.verify_self_map();
        return m;
    }
    static MapSpec disk_rotation(double theta) {
        MapSpec m;
        m.kind = MapKind::DiskRotation;
        m.rotation = theta;
        m.verify_self_map();
        return m;
    }
    static MapSpec annulus_rotation(double theta, double s = 1.0) {
        MapSpec m;
        m.kind = MapKind::AnnulusRotation;
        m.rotation = theta;
        m.annulus_s = s;
        m.verify_self_map();
        return m;
    }
    static MapSpec lattice_translation(cplx step, double hole_radius = 0.25) {
        if (step != cplx(1, 0) && step != cplx(0, 1))
            throw invalid_parameter("lattice_translation: step must be 1 or i");
        MapSpec m;
        m.kind = MapKind::LatticeTranslation;
        m.step = step;
        m.hole_radius = hole_radius;
        m.verify_self_map();
        return m;
    }
    static MapSpec half_plane_affine(double alpha, double beta) {
        if (!(alpha > 0)) throw invalid_parameter("half_plane_affine: alpha must be positive");
        MapSpec m;
        m.kind = MapKind::HalfPlaneAffine;
        m.affine_scale = alpha;
        m.affine_shift = beta;
        m.verify_self_map();
        return m;
    }

    PlanarDomain domain() const {
        switch (kind) {
            case MapKind::DiskMobius:
            case MapKind::DiskRotation: return PlanarDomain::disk();
            case MapKind::AnnulusRotation: return PlanarDomain::annulus(annulus_s);
            case MapKind::LatticeTranslation: return PlanarDomain::lattice_complement(hole_radius);
            case MapKind::HalfPlaneAffine: return PlanarDomain::half_plane();
        }
        throw invalid_parameter("map kind");
    }

    cplx apply(cplx z) const {
        switch (kind) {
            case MapKind::DiskMobius:
                return std::polar(1.0, rotation) * (z + mobius_a) /
                       (1.0 + std::conj(mobius_a) * z);
            case MapKind::DiskRotation: return std::polar(1.0, rotation) * z;
            case MapKind::AnnulusRotation: return std::polar(1.0, rotation) * z;
            case MapKind::LatticeTranslation: return z + step;
            case MapKind::HalfPlaneAffine: return affine_scale * z + affine_shift;
        }
        throw invalid_parameter("map kind");
    }

    void verify_self_map() const {
        PlanarDomain dom = domain();
        std::mt19937 rng(0);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        auto [lo, hi] = dom.default_window();
        int done = 0;
        while (done < 1000) {
            cplx z(lo.real() + (hi.real() - lo.real()) * (u(rng) + 1) / 2,
                   lo.imag() + (hi.imag() - lo.imag()) * (u(rng) + 1) / 2);
            if (!dom.contains(z)) continue;
            ++done;
            if (!dom.contains(apply(z)))
                throw invalid_parameter("map does not send the domain into itself");
        }
    }
};

/// Exact iteration with in-domain verification; escaping (numerically) names
/// the offending step.
inline std::vector<cplx> iterate(const MapSpec& map, cplx z0, int N) {
    if (N < 1) throw invalid_parameter("iterate: N must be >= 1");
    PlanarDomain dom = map.domain();
    if (!dom.contains(z0)) throw query_error("iterate: z0 outside domain");
    std::vector<cplx> orbit{z0};
    orbit.reserve(N + 1);
    for (int n = 1; n <= N; ++n) {
        cplx z = map.apply(orbit.back());
        if (!dom.contains(z))
            throw query_error("iterate: orbit left the domain at step " + std::to_string(n));
        orbit.push_back(z);
    }
    return orbit;
}

/// Karlsson record times: 1-based indices with d_j strictly above every
/// earlier entry.
inline std::vector<std::size_t> record_times(const std::vector<double>& d) {
    std::vector<std::size_t> records;
    double running = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < d.size(); ++j) {
        if (d[j] > running) {
            records.push_back(j + 1);
            running = d[j];
        }
    }
    return records;
}

enum class OrbitVerdict { RelativelyCompact, ConvergesToBoundaryPoint, ConvergesToEnd, Diagnostic };

struct OrbitReport {
    std::vector<cplx> bases;
    std::vector<std::vector<cplx>> orbits;
    std::vector<double> d;  // K(o, F^n(o)) for the first base, n = 1..N
    OrbitVerdict verdict = OrbitVerdict::Diagnostic;
    cplx limit_point{0, 0};
    int limit_end = -1;
    std::vector<std::size_t> records;
    std::string diagnostic;
};

struct OrbitOptions {
    double growth_ratio = 1.05;  // bounded-statistics threshold, last vs middle third
    double agreement_tol = 1e-6;
};

namespace detail {
/// Bounded-statistics heuristic: the last third stays within ratio of the
/// middle third.
inline bool tail_bounded(const std::vector<double>& v, double ratio) {
    std::size_t third = v.size() / 3;
    if (third == 0) return true;
    double mid = 0, last = 0;
    for (std::size_t i = third; i < 2 * third; ++i) mid = std::max(mid, v[i]);
    for (std::size_t i = v.size() - third; i < v.size(); ++i) last = std::max(last, v[i]);
    return last <= ratio * mid + 1e-12;
}
}  // namespace detail

/// Wolff-Denjoy orbit classification: relatively compact when clearance,
/// modulus and Kobayashi displacement all stay bounded over the run;
/// otherwise the common limit is located as a boundary point (Euclidean
/// clustering) or an end (tail classification). Disagreeing base points
/// produce an explicit diagnostic, never a silent verdict.
inline OrbitReport orbit_report(const MapSpec& map, const std::vector<cplx>& bases, int N,
                                const std::function<double(cplx, cplx)>& distance,
                                const EndTree* tree = nullptr, const OrbitOptions& opt = {}) {
    if (bases.size() < 2) throw invalid_parameter("orbit_report: need at least 2 base points");
    PlanarDomain dom = map.domain();
    OrbitReport rep;
    rep.bases = bases;
    for (cplx o : bases) rep.orbits.push_back(iterate(map, o, N));

    for (int n = 1; n <= N; ++n) rep.d.push_back(distance(bases[0], rep.orbits[0][n]));
    rep.records = record_times(rep.d);

    bool bounded = true;
    for (const auto& orbit : rep.orbits) {
        std::vector<double> inv_clear, modulus;
        for (cplx z : orbit) {
            inv_clear.push_back(1.0 / dom.clearance(z));
            modulus.push_back(std::abs(z));
        }
        bounded = bounded && detail::tail_bounded(inv_clear, opt.growth_ratio) &&
                  detail::tail_bounded(modulus, opt.growth_ratio);
    }
    bounded = bounded && detail::tail_bounded(rep.d, opt.growth_ratio);
    if (bounded) {
        rep.verdict = OrbitVerdict::RelativelyCompact;
        return rep;
    }

    // Euclidean clustering of the orbit tails.
    std::vector<cplx> limits;
    bool all_euclid = true;
    for (const auto& orbit : rep.orbits) {
        std::size_t third = std::max<std::size_t>(2, orbit.size() / 3);
        double diam = 0;
        cplx mean = 0;
        for (std::size_t k = orbit.size() - third; k < orbit.size(); ++k) {
            mean += orbit[k];
            for (std::size_t l = k + 1; l < orbit.size(); ++l)
                diam = std::max(diam, std::abs(orbit[k] - orbit[l]));
        }
        mean /= static_cast<double>(third);
        if (diam > opt.agreement_tol) all_euclid = false;
        limits.push_back(mean);
    }
    if (all_euclid) {
        for (std::size_t i = 1; i < limits.size(); ++i)
            if (std::abs(limits[i] - limits[0]) > opt.agreement_tol) {
                rep.verdict = OrbitVerdict::Diagnostic;
                rep.diagnostic = "dichotomy violation: base points disagree on the limit";
                return rep;
            }
        rep.verdict = OrbitVerdict::ConvergesToBoundaryPoint;
        rep.limit_point = limits[0];
        return rep;
    }

    if (tree) {
        int common_end = -2;
        for (const auto& orbit : rep.orbits) {
            auto cls = classify_tail(*tree, orbit, &dom);
            if (cls.kind != TailClass::Kind::End) {
                rep.diagnostic = "orbit tail not classified as an end";
                return rep;
            }
            if (common_end == -2) common_end = cls.end_id;
            if (cls.end_id != common_end) {
                rep.diagnostic = "dichotomy violation: base points reach different ends";
                return rep;
            }
        }
        rep.verdict = OrbitVerdict::ConvergesToEnd;
        rep.limit_end = common_end;
        return rep;
    }
    rep.diagnostic = "orbit escapes but no end tree was provided";
    return rep;
}

struct DivergenceResult {
    bool divergent = false;
    int n0 = 0;  // first index with F^n(K1) disjoint from K2 for all n >= n0
};

/// Tests compact divergence on sampled compacts: whether the iterates of the
/// K1 samples eventually avoid an eps-fattening of the K2 samples.
inline DivergenceResult compact_divergence_check(const MapSpec& map, const std::vector<cplx>& k1,
                                                 const std::vector<cplx>& k2, int N,
                                                 double eps = 0.05) {
    DivergenceResult out;
    int last_hit = 0;
    std::vector<cplx> pts = k1;
    for (int n = 1; n <= N; ++n) {
        for (cplx& z : pts) z = map.apply(z);
        bool hit = false;
        for (cplx a : pts) {
            for (cplx b : k2)
                if (std::abs(a - b) <= eps) {
                    hit = true;
                    break;
                }
            if (hit) break;
        }
        if (hit) last_hit = n;
    }
    if (last_hit == N) {
        out.divergent = false;
        return out;
    }
    out.divergent = true;
    out.n0 = last_hit + 1;
    return out;
}

}  // namespace kobgeo
