#pragma once

#include <cmath>

#include "kobgeo/cone.hpp"
#include "kobgeo/domain.hpp"

namespace kobgeo {

enum class DensityMode { ClosedForm, CoveringPullback, PdeGrid };

inline bool has_closed_form_density(DomainKind k) {
    switch (k) {
        case DomainKind::Disk:
        case DomainKind::HalfPlane:
        case DomainKind::Strip:
        case DomainKind::Annulus:
        case DomainKind::PuncturedDisk: return true;
        default: return false;
    }
}

/// Conformal density lambda with k(z; v) = lambda(z) |v|, normalized so that
/// lambda = 1/(1 - |z|^2) on the unit disk. Annulus and punctured disk come
/// from the half-plane through their covering maps.
inline double density_closed_form(const PlanarDomain& dom, cplx z) {
    DomainKind k = dom.kind() == DomainKind::Raster ? dom.source_kind() : dom.kind();
    switch (k) {
        case DomainKind::Disk: {
            double R = dom.disk_radius();
            return R / (R * R - abs2(z - dom.disk_center()));
        }
        case DomainKind::HalfPlane: return 1.0 / (2.0 * z.imag());
        case DomainKind::Strip: {
            double s = dom.modulus();
            return (kPi / (2.0 * s)) / std::sin(kPi * (-z.real()) / s);
        }
        case DomainKind::Annulus: {
            double s = dom.modulus();
            double r = std::abs(z);
            return (kPi / (2.0 * s)) / (r * std::sin(kPi * (-std::log(r)) / s));
        }
        case DomainKind::PuncturedDisk: {
            double r = std::abs(z);
            return 1.0 / (2.0 * r * std::log(1.0 / r));
        }
        default: throw query_error("density: no closed form for this domain kind");
    }
}

struct PdeOptions {
    double tolerance = 1e-8;       // sup-norm of the scaled discrete residual
    double collar_cells = 3.0;     // Dirichlet collar width in cells
    int max_newton = 60;
    int max_sweeps = 40000;        // SSOR double-sweeps per linear solve
    double linear_tol = 1e-10;
};

/// Density evaluator: closed form when the domain has one, else a solved grid
/// of u = log(lambda) from the Liouville equation  Lap u = 4 e^{2u}  with
/// collar data u = -log(2 delta).
class DensityField {
  public:
    /// Closed-form (or covering-pullback) field; throws if the kind needs a
    /// PDE solve.
    explicit DensityField(PlanarDomain dom) : domain_(std::move(dom)) {
        DomainKind k = domain_.kind() == DomainKind::Raster ? domain_.source_kind()
                                                            : domain_.kind();
        if (!has_closed_form_density(k))
            throw query_error("density: pde-grid not solved for this domain");
        mode_ = (k == DomainKind::Annulus || k == DomainKind::PuncturedDisk)
                    ? DensityMode::CoveringPullback
                    : DensityMode::ClosedForm;
    }

    DensityMode mode() const { return mode_; }
    double residual() const { return residual_; }
    double collar_width() const { return collar_width_; }
    const PlanarDomain& domain() const { return domain_; }

    double operator()(cplx z) const {
        if (mode_ != DensityMode::PdeGrid) {
            if (!domain_.contains(z)) throw query_error("density: point outside domain");
            return density_closed_form(domain_, z);
        }
        return eval_grid(z);
    }

    double log_at_cell(int i, int j) const { return u_[domain_.mask().index(i, j)]; }

    friend DensityField solve_density_pde(const PlanarDomain& dom, const PdeOptions& opt);

  private:
    struct pde_tag {};
    DensityField(PlanarDomain dom, pde_tag) : domain_(std::move(dom)), mode_(DensityMode::PdeGrid) {}

    double eval_grid(cplx z) const {
        const RasterMask& m = domain_.mask();
        // Bilinear in the cell-center lattice, restricted to inside cells.
        double gx = (z.real() - m.origin().real()) / m.spacing() - 0.5;
        double gy = (z.imag() - m.origin().imag()) / m.spacing() - 0.5;
        int i0 = static_cast<int>(std::floor(gx)), j0 = static_cast<int>(std::floor(gy));
        double fx = gx - i0, fy = gy - j0;
        double wsum = 0, usum = 0;
        for (int dj = 0; dj <= 1; ++dj)
            for (int di = 0; di <= 1; ++di) {
                int i = i0 + di, j = j0 + dj;
                if (!m.in_grid(i, j) || !m.at(i, j)) continue;
                double w = (di ? fx : 1 - fx) * (dj ? fy : 1 - fy);
                if (w <= 0) continue;
                wsum += w;
                usum += w * u_[m.index(i, j)];
            }
        if (wsum <= 0) throw query_error("density: point outside solved grid");
        return std::exp(usum / wsum);
    }

    PlanarDomain domain_;
    DensityMode mode_ = DensityMode::ClosedForm;
    std::vector<double> u_;
    double residual_ = 0;
    double collar_width_ = 0;
};

/// Damped Newton for the discrete Liouville problem on the raster's inside
/// cells; Dirichlet collar u = -log(2 delta) where delta < collar_cells * h.
/// Inner solves use symmetric SOR. Throws on stagnation (residual not reduced
/// 10x over 20 iterations).
inline DensityField solve_density_pde(const PlanarDomain& dom, const PdeOptions& opt = {}) {
    if (dom.kind() != DomainKind::Raster) throw invalid_parameter("solve_density_pde: raster domain required");
    if (!(opt.tolerance >= 1e-10)) throw invalid_parameter("solve_density_pde: tolerance must be >= 1e-10");
    const RasterMask& m = dom.mask();
    const double h = m.spacing();
    const double collar = opt.collar_cells * h;

    // delta per inside cell: analytic when available, else transform values.
    std::vector<double> delta(m.size(), 0.0);
    for (int j = 0; j < m.ny(); ++j)
        for (int i = 0; i < m.nx(); ++i)
            if (m.at(i, j)) delta[m.index(i, j)] = dom.clearance(m.center(i, j));

    std::vector<std::uint8_t> unknown(m.size(), 0);
    std::vector<std::size_t> cells;
    for (int j = 0; j < m.ny(); ++j)
        for (int i = 0; i < m.nx(); ++i) {
            std::size_t k = m.index(i, j);
            if (!m.at(i, j)) continue;
            bool interior4 = m.in_grid(i - 1, j) && m.at(i - 1, j) && m.in_grid(i + 1, j) &&
                             m.at(i + 1, j) && m.in_grid(i, j - 1) && m.at(i, j - 1) &&
                             m.in_grid(i, j + 1) && m.at(i, j + 1);
            if (delta[k] >= collar && interior4) {
                unknown[k] = 1;
                cells.push_back(k);
            }
        }
    if (cells.empty())
        throw invalid_parameter("solve_density_pde: no interior cells beyond the collar");

    DensityField field(dom, DensityField::pde_tag{});
    field.collar_width_ = collar;
    std::vector<double>& u = field.u_;
    u.assign(m.size(), 0.0);
    for (std::size_t k = 0; k < m.size(); ++k)
        if (delta[k] > 0) u[k] = -std::log(2.0 * delta[k]);

    const double h2 = h * h;
    const std::size_t stride = m.nx();
    auto residual_at = [&](std::size_t k) {
        double lap = u[k - 1] + u[k + 1] + u[k - stride] + u[k + stride] - 4.0 * u[k];
        return lap - 4.0 * h2 * std::exp(2.0 * u[k]);
    };
    auto sup_residual = [&] {
        double r = 0;
        for (std::size_t k : cells) r = std::max(r, std::abs(residual_at(k)));
        return r;
    };

    double omega = 2.0 / (1.0 + std::sin(kPi / std::max(m.nx(), m.ny())));
    std::vector<double> rhs(m.size(), 0.0), diag(m.size(), 0.0), d(m.size(), 0.0);

    double res = sup_residual();
    double best_res = res;
    int since_best = 0;
    for (int it = 0; it < opt.max_newton && res > opt.tolerance; ++it) {
        for (std::size_t k : cells) {
            rhs[k] = residual_at(k);
            diag[k] = 4.0 + 8.0 * h2 * std::exp(2.0 * u[k]);
            d[k] = 0.0;
        }
        // SSOR on (sum_nb d - diag d) = -rhs restricted to unknown cells.
        double target = opt.linear_tol * std::max(1.0, res);
        for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
            auto update = [&](std::size_t k) {
                double nb = (unknown[k - 1] ? d[k - 1] : 0.0) + (unknown[k + 1] ? d[k + 1] : 0.0) +
                            (unknown[k - stride] ? d[k - stride] : 0.0) +
                            (unknown[k + stride] ? d[k + stride] : 0.0);
                d[k] += omega * ((nb + rhs[k]) / diag[k] - d[k]);
            };
            for (std::size_t idx = 0; idx < cells.size(); ++idx) update(cells[idx]);
            for (std::size_t idx = cells.size(); idx-- > 0;) update(cells[idx]);
            if (sweep % 16 == 15 || sweep + 1 == opt.max_sweeps) {
                double lin = 0;
                for (std::size_t k : cells) {
                    double nb = (unknown[k - 1] ? d[k - 1] : 0.0) +
                                (unknown[k + 1] ? d[k + 1] : 0.0) +
                                (unknown[k - stride] ? d[k - stride] : 0.0) +
                                (unknown[k + stride] ? d[k + stride] : 0.0);
                    lin = std::max(lin, std::abs(nb - diag[k] * d[k] + rhs[k]));
                }
                if (lin <= target) break;
            }
        }
        // Damped update: halve until the residual decreases.
        double alpha = 1.0;
        std::vector<double> u_old = u;
        double new_res = res;
        for (int halvings = 0; halvings < 40; ++halvings) {
            for (std::size_t k : cells) u[k] = u_old[k] + alpha * d[k];
            new_res = sup_residual();
            if (new_res < res) break;
            alpha *= 0.5;
        }
        res = new_res;
        if (res < best_res / 1.0000001) {
            best_res = res;
            since_best = 0;
        } else if (++since_best >= 20 && res > best_res / 10.0) {
            throw std::runtime_error("solve_density_pde: Newton stagnation, residual " +
                                     std::to_string(res));
        }
    }
    if (res > opt.tolerance)
        throw std::runtime_error("solve_density_pde: did not reach tolerance, residual " +
                                 std::to_string(res));
    field.residual_ = res;
    return field;
}

// -- bounds ------------------------------------------------------------------

struct DensityBounds {
    double lower = 0;
    double upper = 0;
    std::string lower_provenance;
    std::string upper_provenance;
};

/// Nearest boundary point, exact for model kinds (raster: nearest boundary
/// cell center).
inline cplx nearest_boundary_point(const PlanarDomain& dom, cplx z) {
    DomainKind k = dom.kind() == DomainKind::Raster ? dom.source_kind() : dom.kind();
    switch (k) {
        case DomainKind::Disk: {
            cplx w = z - dom.disk_center();
            if (std::abs(w) == 0) w = 1;
            return dom.disk_center() + dom.disk_radius() * w / std::abs(w);
        }
        case DomainKind::HalfPlane: return {z.real(), 0};
        case DomainKind::Strip:
            return {(-z.real() < z.real() + dom.modulus()) ? 0.0 : -dom.modulus(), z.imag()};
        case DomainKind::Annulus: {
            double r = std::abs(z), rin = std::exp(-dom.modulus());
            return (1 - r < r - rin ? 1.0 : rin) * z / r;
        }
        case DomainKind::PuncturedDisk: {
            double r = std::abs(z);
            return (1 - r < r) ? z / r : cplx(0, 0);
        }
        case DomainKind::LatticeComplement: {
            cplx c = PlanarDomain::nearest_lattice_point(z);
            cplx w = z - c;
            if (std::abs(w) == 0) w = 1;
            return c + dom.hole_radius() * w / std::abs(w);
        }
        default: break;
    }
    // Raster / chained: scan boundary cells near z.
    const RasterMask& m = dom.kind() == DomainKind::Raster
                              ? dom.mask()
                              : throw query_error("nearest_boundary_point: no raster");
    double best = 1e300;
    cplx bp = z;
    int zi, zj;
    m.locate(z, zi, zj);
    int rad = static_cast<int>(std::ceil(dom.clearance(z) / m.spacing())) + 3;
    for (int j = std::max(0, zj - rad); j < std::min(m.ny(), zj + rad + 1); ++j)
        for (int i = std::max(0, zi - rad); i < std::min(m.nx(), zi + rad + 1); ++i)
            if (m.is_boundary_cell(i, j)) {
                double dd = std::abs(z - m.center(i, j));
                if (dd < best) {
                    best = dd;
                    bp = m.center(i, j);
                }
            }
    return bp;
}

/// Two-sided bounds: upper 1/delta from the inscribed-disk comparison, lower
/// c1/(4(2-c1) delta) from an exterior cone at the nearest boundary point.
/// Without a cone certificate the lower bound is reported as 0.
inline DensityBounds density_bounds(const PlanarDomain& dom, cplx z,
                                    const std::optional<ConeParams>& cone_hint = std::nullopt) {
    double delta = dom.clearance(z);
    DensityBounds b;
    b.upper = 1.0 / delta;
    b.upper_provenance = "inscribed disk B(z, delta)";
    std::optional<ConeParams> cone = cone_hint;
    if (!cone) {
        cplx x = nearest_boundary_point(dom, z);
        ConeSearchGrid grid;
        grid.reaches = {1.0, 0.5, 0.25, 0.125};
        if (!dom.analytic_membership()) grid.min_radial = dom.mask().spacing();
        auto res = estimate_cone_params(dom, x, ConeSide::Exterior, grid);
        cone = res.cone;
    }
    if (!cone) {
        b.lower = 0;
        b.lower_provenance = "no exterior cone found";
        return b;
    }
    double c1 = cone_ball_fraction(*cone, delta);
    if (c1 <= 0) {
        b.lower = 0;
        b.lower_provenance = "degenerate cone ball";
        return b;
    }
    b.lower = c1 / (4.0 * (2.0 - c1) * delta);
    b.lower_provenance = "exterior cone, c1 = " + std::to_string(c1);
    return b;
}

inline double kobayashi_metric(const DensityField& field, cplx z, cplx v) {
    if (std::abs(v) == 0) return 0;
    return field(z) * std::abs(v);
}

}  // namespace kobgeo
