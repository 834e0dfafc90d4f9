#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "kobgeo/core.hpp"
#include "kobgeo/raster.hpp"

namespace kobgeo {

enum class DomainKind {
    Disk,
    HalfPlane,          // upper half plane {Im z > 0}
    Strip,              // vertical strip {-s < Re z < 0}
    Annulus,            // A_s = {e^{-s} < |z| < 1}
    PuncturedDisk,      // {0 < |z| < 1}
    LatticeComplement,  // plane minus closed disks of radius r at Z + Zi
    ChainedAnnuli,      // union of annuli A_{s_n}+z_n joined by thin collars
    Raster,
};

inline const char* kind_name(DomainKind k) {
    switch (k) {
        case DomainKind::Disk: return "disk";
        case DomainKind::HalfPlane: return "half_plane";
        case DomainKind::Strip: return "strip";
        case DomainKind::Annulus: return "annulus";
        case DomainKind::PuncturedDisk: return "punctured_disk";
        case DomainKind::LatticeComplement: return "lattice_complement";
        case DomainKind::ChainedAnnuli: return "chained_annuli";
        case DomainKind::Raster: return "raster";
    }
    return "?";
}

/// A planar hyperbolic domain: model kinds answer membership and boundary
/// clearance in closed form; Raster answers from a cell mask (clearance via
/// the distance transform, error <= h). Model-backed rasters keep the exact
/// predicates of the kind they were sampled from.
class PlanarDomain {
  public:
    // -- constructors ------------------------------------------------------
    static PlanarDomain disk(cplx center = 0.0, double radius = 1.0) {
        if (!(radius > 0)) throw invalid_parameter("disk: radius must be positive");
        PlanarDomain d(DomainKind::Disk);
        d.center_ = center;
        d.radius_ = radius;
        return d;
    }
    static PlanarDomain half_plane() { return PlanarDomain(DomainKind::HalfPlane); }
    static PlanarDomain strip(double s) {
        if (!(s > 0)) throw invalid_parameter("strip: s must be positive");
        PlanarDomain d(DomainKind::Strip);
        d.modulus_ = s;
        return d;
    }
    static PlanarDomain annulus(double s) {
        if (!(s > 0)) throw invalid_parameter("annulus: s must be positive");
        PlanarDomain d(DomainKind::Annulus);
        d.modulus_ = s;
        return d;
    }
    static PlanarDomain punctured_disk() { return PlanarDomain(DomainKind::PuncturedDisk); }
    static PlanarDomain lattice_complement(double hole_radius) {
        if (!(hole_radius > 0 && hole_radius < 0.5))
            throw invalid_parameter("lattice_complement: hole_radius must lie in (0, 1/2)");
        PlanarDomain d(DomainKind::LatticeComplement);
        d.radius_ = hole_radius;
        return d;
    }
    static PlanarDomain chained_annuli(std::vector<double> moduli) {
        if (moduli.empty()) throw invalid_parameter("chained_annuli: moduli list is empty");
        for (double s : moduli)
            if (!(s > 0 && s < 1))
                throw invalid_parameter("chained_annuli: each modulus must lie in (0,1)");
        PlanarDomain d(DomainKind::ChainedAnnuli);
        d.moduli_ = std::move(moduli);
        return d;
    }
    static PlanarDomain raster(RasterMask mask) {
        PlanarDomain d(DomainKind::Raster);
        d.attach_raster(std::move(mask));
        bool has_core = false;
        const RasterMask& m = d.raster_->mask;
        for (int j = 1; j + 1 < m.ny() && !has_core; ++j)
            for (int i = 1; i + 1 < m.nx() && !has_core; ++i) {
                if (!m.at(i, j)) continue;
                bool all = true;
                for (int dj = -1; dj <= 1 && all; ++dj)
                    for (int di = -1; di <= 1 && all; ++di)
                        if (!m.at(i + di, j + dj)) all = false;
                has_core = all;
            }
        if (!has_core)
            throw invalid_parameter("raster: mask needs an interior cell with all 8 neighbors inside");
        return d;
    }

    DomainKind kind() const { return kind_; }
    cplx disk_center() const { return center_; }
    double disk_radius() const { return radius_; }
    double modulus() const { return modulus_; }
    double hole_radius() const { return radius_; }
    const std::vector<double>& moduli() const { return moduli_; }

    /// For Raster domains created by rasterize(): the kind the mask was
    /// sampled from (Raster when built from a bare mask).
    DomainKind source_kind() const {
        return raster_ ? raster_->source_kind : kind_;
    }

    /// True when membership queries resolve by formula rather than by cell
    /// lookup (all model kinds; rasters sampled from a model kind).
    bool analytic_membership() const {
        return kind_ != DomainKind::Raster || raster_->analytic_contains != nullptr;
    }

    // -- membership and clearance ------------------------------------------
    bool contains(cplx z) const {
        switch (kind_) {
            case DomainKind::Disk: return std::abs(z - center_) < radius_;
            case DomainKind::HalfPlane: return z.imag() > 0;
            case DomainKind::Strip: return z.real() > -modulus_ && z.real() < 0;
            case DomainKind::Annulus: {
                double r = std::abs(z);
                return r > std::exp(-modulus_) && r < 1.0;
            }
            case DomainKind::PuncturedDisk: {
                double r = std::abs(z);
                return r > 0 && r < 1.0;
            }
            case DomainKind::LatticeComplement:
                return std::abs(z - nearest_lattice_point(z)) > radius_;
            case DomainKind::ChainedAnnuli: return chained_contains(z);
            case DomainKind::Raster:
                if (raster_->analytic_contains) return raster_->analytic_contains(z);
                return raster_->mask.contains_point(z);
        }
        return false;
    }

    /// Euclidean distance delta_Omega(z) to the boundary. Exact for model
    /// kinds (ChainedAnnuli: via a lazily built fine raster, error <= its
    /// spacing); within h for Raster. Throws query_error outside the domain.
    double clearance(cplx z) const {
        if (!contains(z)) throw query_error("clearance: point outside domain");
        switch (kind_) {
            case DomainKind::Disk: return radius_ - std::abs(z - center_);
            case DomainKind::HalfPlane: return z.imag();
            case DomainKind::Strip: return std::min(-z.real(), z.real() + modulus_);
            case DomainKind::Annulus: {
                double r = std::abs(z);
                return std::min(1.0 - r, r - std::exp(-modulus_));
            }
            case DomainKind::PuncturedDisk: {
                double r = std::abs(z);
                return std::min(1.0 - r, r);
            }
            case DomainKind::LatticeComplement:
                return std::abs(z - nearest_lattice_point(z)) - radius_;
            case DomainKind::ChainedAnnuli: return chained_clearance(z);
            case DomainKind::Raster:
                if (raster_->analytic_clearance) return raster_->analytic_clearance(z);
                return raster_clearance(z);
        }
        return 0.0;
    }

    // -- raster access -------------------------------------------------------
    bool has_raster() const { return raster_ != nullptr; }
    const RasterMask& mask() const {
        require_raster();
        return raster_->mask;
    }
    const std::vector<double>& clearance_cells() const {
        require_raster();
        return raster_->clearance;
    }

    /// Samples this domain on a cell grid. The result is a Raster domain that
    /// keeps the analytic membership/clearance of the source kind.
    PlanarDomain rasterize(double h, cplx lo, cplx hi) const {
        if (kind_ == DomainKind::Raster) throw invalid_parameter("rasterize: already a raster");
        if (!(h > 0)) throw invalid_parameter("rasterize: spacing must be positive");
        int nx = std::max(2, static_cast<int>(std::ceil((hi.real() - lo.real()) / h)));
        int ny = std::max(2, static_cast<int>(std::ceil((hi.imag() - lo.imag()) / h)));
        RasterMask m(nx, ny, lo, h);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                if (contains(m.center(i, j))) m.set(i, j, true);
        PlanarDomain model = *this;
        PlanarDomain d(DomainKind::Raster);
        d.center_ = center_;
        d.radius_ = radius_;
        d.modulus_ = modulus_;
        d.moduli_ = moduli_;
        d.attach_raster(std::move(m));
        d.raster_->source_kind = kind_;
        if (kind_ != DomainKind::ChainedAnnuli) {
            d.raster_->analytic_contains = [model](cplx z) { return model.contains(z); };
            d.raster_->analytic_clearance = [model](cplx z) { return model.clearance(z); };
        } else {
            // Union boundary has no closed-form distance; keep the analytic
            // membership and let clearance come from the transform.
            d.raster_->analytic_contains = [model](cplx z) { return model.contains(z); };
        }
        return d;
    }
    PlanarDomain rasterize(double h) const {
        auto [lo, hi] = default_window();
        return rasterize(h, lo, hi);
    }

    /// Natural window enclosing the interesting part of the domain.
    std::pair<cplx, cplx> default_window() const {
        switch (kind_) {
            case DomainKind::Disk:
                return {center_ - cplx(radius_ * 1.05, radius_ * 1.05),
                        center_ + cplx(radius_ * 1.05, radius_ * 1.05)};
            case DomainKind::HalfPlane: return {cplx(-4, 0), cplx(4, 4)};
            case DomainKind::Strip:
                return {cplx(-modulus_ * 1.02 - 0.01, -4), cplx(0.02, 4)};
            case DomainKind::Annulus:
            case DomainKind::PuncturedDisk: return {cplx(-1.05, -1.05), cplx(1.05, 1.05)};
            case DomainKind::LatticeComplement: return {cplx(-8.5, -8.5), cplx(8.5, 8.5)};
            case DomainKind::ChainedAnnuli: {
                // The window cuts through the last collar (reach 2) so the
                // truncated chain meets the frame and counts as an end.
                double xmax = 3.0 * (static_cast<double>(moduli_.size()) - 1.0) + 1.8;
                return {cplx(-2.2, -2.2), cplx(xmax, 2.2)};
            }
            case DomainKind::Raster: {
                const RasterMask& m = raster_->mask;
                return {m.origin(), m.origin() + cplx(m.nx() * m.spacing(), m.ny() * m.spacing())};
            }
        }
        return {cplx(-1, -1), cplx(1, 1)};
    }

    /// Boundary sample points (for cone searches and collar sampling).
    std::vector<cplx> boundary_points(int n) const {
        std::vector<cplx> pts;
        pts.reserve(n);
        switch (kind_) {
            case DomainKind::Disk:
                for (int k = 0; k < n; ++k)
                    pts.push_back(center_ + radius_ * unit_dir(2 * kPi * k / n));
                break;
            case DomainKind::HalfPlane:
                for (int k = 0; k < n; ++k) pts.push_back(cplx(-4.0 + 8.0 * k / (n - 1.0), 0.0));
                break;
            case DomainKind::Strip:
                for (int k = 0; k < n; ++k) {
                    double y = -4.0 + 8.0 * (k / 2) / (n / 2 - 1.0);
                    pts.push_back(cplx(k % 2 == 0 ? 0.0 : -modulus_, y));
                }
                break;
            case DomainKind::Annulus: {
                double rin = std::exp(-modulus_);
                for (int k = 0; k < n; ++k) {
                    double a = 2 * kPi * (k / 2) / std::max(1, n / 2);
                    pts.push_back((k % 2 == 0 ? 1.0 : rin) * unit_dir(a));
                }
                break;
            }
            case DomainKind::PuncturedDisk:
                for (int k = 0; k + 1 < n; ++k) pts.push_back(unit_dir(2 * kPi * k / (n - 1)));
                pts.push_back(0.0);
                break;
            case DomainKind::LatticeComplement:
                for (int k = 0; k < n; ++k)
                    pts.push_back(radius_ * unit_dir(2 * kPi * k / n));
                break;
            case DomainKind::ChainedAnnuli:
            case DomainKind::Raster: {
                const RasterMask& m = kind_ == DomainKind::Raster ? raster_->mask
                                                                  : chained_raster().mask;
                for (int j = 0; j < m.ny(); ++j)
                    for (int i = 0; i < m.nx(); ++i)
                        if (m.is_boundary_cell(i, j)) pts.push_back(m.center(i, j));
                break;
            }
        }
        return pts;
    }

    static cplx nearest_lattice_point(cplx z) {
        return {std::round(z.real()), std::round(z.imag())};
    }

    /// Chained-annuli layout: center of the n-th annulus (n from 0).
    static double chain_center(std::size_t n) { return 3.0 * static_cast<double>(n); }

  private:
    explicit PlanarDomain(DomainKind k) : kind_(k) {}

    struct RasterData {
        RasterMask mask;
        std::vector<double> clearance;
        std::function<bool(cplx)> analytic_contains;
        std::function<double(cplx)> analytic_clearance;
        DomainKind source_kind = DomainKind::Raster;
    };

    void attach_raster(RasterMask m) {
        raster_ = std::make_shared<RasterData>();
        raster_->mask = std::move(m);
        raster_->clearance = raster_->mask.clearance_field();
    }
    void require_raster() const {
        if (!raster_) throw query_error("domain has no raster realization");
    }

    bool chained_contains(cplx z) const {
        for (std::size_t n = 0; n < moduli_.size(); ++n) {
            cplx c(chain_center(n), 0.0);
            double r = std::abs(z - c);
            double rin = std::exp(-moduli_[n]);
            if (r > rin && r < 1.0) return true;
            double half_width = 1.0 / static_cast<double>(n + 1);
            if (r > rin && r < 2.0 && std::abs(z.imag()) < half_width) return true;
        }
        return false;
    }

    const RasterData& chained_raster() const {
        if (!chained_cache_) {
            auto [lo, hi] = default_window();
            auto r = rasterize_chained(1.0 / 64.0, lo, hi);
            chained_cache_ = std::make_shared<RasterData>(std::move(r));
        }
        return *chained_cache_;
    }
    RasterData rasterize_chained(double h, cplx lo, cplx hi) const {
        int nx = static_cast<int>(std::ceil((hi.real() - lo.real()) / h));
        int ny = static_cast<int>(std::ceil((hi.imag() - lo.imag()) / h));
        RasterMask m(nx, ny, lo, h);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                if (chained_contains(m.center(i, j))) m.set(i, j, true);
        RasterData d;
        d.mask = std::move(m);
        d.clearance = d.mask.clearance_field();
        d.source_kind = DomainKind::ChainedAnnuli;
        return d;
    }
    double chained_clearance(cplx z) const { return interpolate_clearance(chained_raster(), z); }

    static double interpolate_clearance(const RasterData& r, cplx z) {
        const RasterMask& m = r.mask;
        int ci, cj;
        m.locate(z, ci, cj);
        if (!m.in_grid(ci, cj) || !m.at(ci, cj)) return 0.25 * m.spacing();
        double gx = (z.real() - m.origin().real()) / m.spacing() - 0.5;
        double gy = (z.imag() - m.origin().imag()) / m.spacing() - 0.5;
        int i0 = static_cast<int>(std::floor(gx)), j0 = static_cast<int>(std::floor(gy));
        double fx = gx - i0, fy = gy - j0;
        double wsum = 0, vsum = 0;
        for (int dj = 0; dj <= 1; ++dj)
            for (int di = 0; di <= 1; ++di) {
                int i = i0 + di, j = j0 + dj;
                if (!m.in_grid(i, j) || !m.at(i, j)) continue;
                double w = (di ? fx : 1 - fx) * (dj ? fy : 1 - fy);
                if (w <= 0) continue;
                wsum += w;
                vsum += w * r.clearance[m.index(i, j)];
            }
        if (wsum <= 0) return r.clearance[m.index(ci, cj)];
        return vsum / wsum;
    }

    double raster_clearance(cplx z) const { return interpolate_clearance(*raster_, z); }

    DomainKind kind_;
    cplx center_{0, 0};
    double radius_ = 1.0;   // disk radius or lattice hole radius
    double modulus_ = 1.0;  // strip width / annulus modulus
    std::vector<double> moduli_;
    std::shared_ptr<RasterData> raster_;
    mutable std::shared_ptr<RasterData> chained_cache_;
};

}  // namespace kobgeo
