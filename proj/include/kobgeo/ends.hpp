#pragma once

#include "kobgeo/domain.hpp"

namespace kobgeo {

struct EndComponent {
    int id = 0;
    int parent = -1;  // component id one level up; -1 at the first level
    bool unbounded = false;
    std::size_t cells = 0;
};

/// Levels of connected components of closure \ B(0, R_n), with parent links.
/// Ends (at the truncation depth) are the unbounded components of the deepest
/// level.
struct EndTree {
    std::vector<double> radii;
    std::vector<std::vector<EndComponent>> levels;
    std::vector<std::vector<std::int32_t>> labels;  // per level, per closure cell
    RasterMask closure;
    std::string note;
};

/// Connected-component labeling (8-connectivity) of the dilated mask minus
/// each closed exhaustion ball. A component is flagged unbounded when it
/// touches the raster frame. Parent containment is asserted during the build.
inline EndTree build_end_tree(const PlanarDomain& dom, std::vector<double> radii) {
    if (radii.empty()) throw invalid_parameter("build_end_tree: no radii");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] > radii[i - 1]))
            throw invalid_parameter("build_end_tree: radii must strictly increase");
    const RasterMask& base = dom.mask();

    EndTree tree;
    tree.radii = std::move(radii);
    tree.closure = base.dilated();
    const RasterMask& cl = tree.closure;

    for (std::size_t lvl = 0; lvl < tree.radii.size(); ++lvl) {
        double R = tree.radii[lvl];
        auto [labels, count] = cl.label_components(
            [&](int i, int j) { return cl.at(i, j) && std::abs(cl.center(i, j)) > R; });
        std::vector<EndComponent> comps(count);
        for (int c = 0; c < count; ++c) comps[c].id = c;
        for (int j = 0; j < cl.ny(); ++j)
            for (int i = 0; i < cl.nx(); ++i) {
                std::int32_t lab = labels[cl.index(i, j)];
                if (lab < 0) continue;
                EndComponent& comp = comps[lab];
                ++comp.cells;
                if (i == 0 || j == 0 || i == cl.nx() - 1 || j == cl.ny() - 1)
                    comp.unbounded = true;
                if (lvl > 0) {
                    std::int32_t up = tree.labels[lvl - 1][cl.index(i, j)];
                    if (up < 0)
                        throw std::runtime_error("build_end_tree: cell escapes the parent level");
                    if (comp.parent == -1) comp.parent = up;
                    else if (comp.parent != up)
                        throw std::runtime_error("build_end_tree: component spans two parents");
                }
            }
        tree.levels.push_back(std::move(comps));
        tree.labels.push_back(std::move(labels));
    }
    if (!tree.levels.empty() && tree.levels.front().empty())
        tree.note = "domain lies inside the smallest exhaustion ball";
    return tree;
}

inline int count_ends(const EndTree& tree) {
    if (tree.levels.empty()) return 0;
    int n = 0;
    for (const EndComponent& c : tree.levels.back())
        if (c.unbounded) ++n;
    return n;
}

struct TailClass {
    enum class Kind { End, BoundaryPoint, NotConvergent } kind = Kind::NotConvergent;
    int end_id = -1;
    cplx point{0, 0};
    std::vector<int> visited;  // deepest-level components seen by the tail
};

/// Classifies where a point sequence is heading: an end (the tail settles in
/// one deepest-level unbounded component), a boundary point (Euclidean
/// convergence toward the boundary), or neither.
inline TailClass classify_tail(const EndTree& tree, const std::vector<cplx>& seq,
                               const PlanarDomain* dom = nullptr) {
    TailClass out;
    if (seq.empty() || tree.levels.empty()) return out;
    const RasterMask& cl = tree.closure;
    std::size_t tail_len = std::max<std::size_t>(3, seq.size() / 3);
    tail_len = std::min(tail_len, seq.size());
    std::size_t start = seq.size() - tail_len;

    auto deepest_label = [&](cplx z) -> std::int32_t {
        int i, j;
        cl.locate(z, i, j);
        if (!cl.in_grid(i, j)) return -1;
        return tree.labels.back()[cl.index(i, j)];
    };

    bool all_same = true;
    std::int32_t common = -2;
    for (std::size_t k = start; k < seq.size(); ++k) {
        std::int32_t lab = deepest_label(seq[k]);
        if (lab >= 0 && std::find(out.visited.begin(), out.visited.end(), lab) == out.visited.end())
            out.visited.push_back(lab);
        if (common == -2) common = lab;
        if (lab != common || lab < 0) all_same = false;
    }
    if (all_same && common >= 0 && tree.levels.back()[common].unbounded) {
        out.kind = TailClass::Kind::End;
        out.end_id = common;
        return out;
    }

    double diam = 0;
    cplx mean = 0;
    for (std::size_t k = start; k < seq.size(); ++k) {
        mean += seq[k];
        for (std::size_t l = k + 1; l < seq.size(); ++l)
            diam = std::max(diam, std::abs(seq[k] - seq[l]));
    }
    mean /= static_cast<double>(tail_len);
    double h = cl.spacing();
    if (diam <= 4 * h) {
        bool near_boundary = true;
        if (dom) {
            if (dom->contains(mean)) near_boundary = dom->clearance(mean) <= 4 * h + diam;
        }
        if (near_boundary) {
            out.kind = TailClass::Kind::BoundaryPoint;
            out.point = mean;
            return out;
        }
    }
    out.kind = TailClass::Kind::NotConvergent;
    return out;
}

}  // namespace kobgeo
