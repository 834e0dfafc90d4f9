#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <limits>
#include <vector>

#include "kobgeo/core.hpp"

namespace kobgeo {

struct disjoint_set {
    std::vector<std::uint32_t> parent;
    std::vector<std::uint32_t> rank;

    explicit disjoint_set(std::size_t n) : parent(n), rank(n, 0) {
        for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<std::uint32_t>(i);
    }
    std::uint32_t find(std::uint32_t i) {
        std::uint32_t root = i;
        while (parent[root] != root) root = parent[root];
        while (parent[i] != root) {
            std::uint32_t next = parent[i];
            parent[i] = root;
            i = next;
        }
        return root;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank[a] < rank[b]) std::swap(a, b);
        parent[b] = a;
        if (rank[a] == rank[b]) ++rank[a];
    }
};

/// Boolean cell grid over a window of the plane. Cell (i,j) has center
/// origin + (i+1/2)h + i(j+1/2)h; "inside" means the cell center lies in the
/// domain the mask was sampled from.
class RasterMask {
  public:
    RasterMask() = default;
    RasterMask(int nx, int ny, cplx origin, double h)
        : nx_(nx), ny_(ny), origin_(origin), h_(h), cells_(static_cast<std::size_t>(nx) * ny, 0) {
        if (nx <= 0 || ny <= 0 || h <= 0) throw invalid_parameter("RasterMask: bad dimensions");
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double spacing() const { return h_; }
    cplx origin() const { return origin_; }
    std::size_t size() const { return cells_.size(); }

    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
    bool in_grid(int i, int j) const { return i >= 0 && i < nx_ && j >= 0 && j < ny_; }

    bool at(int i, int j) const { return cells_[index(i, j)] != 0; }
    void set(int i, int j, bool v) { cells_[index(i, j)] = v ? 1 : 0; }

    cplx center(int i, int j) const {
        return origin_ + cplx((i + 0.5) * h_, (j + 0.5) * h_);
    }
    /// Cell containing z (may be out of grid; check in_grid).
    void locate(cplx z, int& i, int& j) const {
        i = static_cast<int>(std::floor((z.real() - origin_.real()) / h_));
        j = static_cast<int>(std::floor((z.imag() - origin_.imag()) / h_));
    }
    bool contains_point(cplx z) const {
        int i, j;
        locate(z, i, j);
        return in_grid(i, j) && at(i, j);
    }

    std::size_t count_inside() const {
        std::size_t n = 0;
        for (auto c : cells_) n += c;
        return n;
    }

    /// Interior cells with at least one exterior 8-neighbor (or on the frame).
    bool is_boundary_cell(int i, int j) const {
        if (!at(i, j)) return false;
        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di) {
                if (di == 0 && dj == 0) continue;
                int a = i + di, b = j + dj;
                if (!in_grid(a, b) || !at(a, b)) return true;
            }
        return false;
    }

    /// One-cell 8-neighborhood dilation (raster closure).
    RasterMask dilated() const {
        RasterMask out(nx_, ny_, origin_, h_);
        for (int j = 0; j < ny_; ++j)
            for (int i = 0; i < nx_; ++i) {
                bool v = false;
                for (int dj = -1; dj <= 1 && !v; ++dj)
                    for (int di = -1; di <= 1 && !v; ++di) {
                        int a = i + di, b = j + dj;
                        if (in_grid(a, b) && at(a, b)) v = true;
                    }
                out.cells_[out.index(i, j)] = v ? 1 : 0;
            }
        return out;
    }

    /// Exact squared Euclidean distance (in cells) to the nearest cell where
    /// `seed` is true, via the two-pass lower-envelope transform.
    std::vector<double> squared_distance_to(const std::vector<std::uint8_t>& seed) const {
        const double kInf = 1e18;
        std::vector<double> f(size());
        for (std::size_t k = 0; k < size(); ++k) f[k] = seed[k] ? 0.0 : kInf;

        std::vector<double> row(std::max(nx_, ny_)), out(std::max(nx_, ny_));
        std::vector<int> v(std::max(nx_, ny_));
        std::vector<double> zb(std::max(nx_, ny_) + 1);

        auto transform_1d = [&](int n) {
            int k = 0;
            v[0] = 0;
            zb[0] = -kInf;
            zb[1] = kInf;
            for (int q = 1; q < n; ++q) {
                double s;
                while (true) {
                    s = ((row[q] + q * q) - (row[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
                    if (s <= zb[k]) {
                        --k;
                    } else {
                        break;
                    }
                }
                ++k;
                v[k] = q;
                zb[k] = s;
                zb[k + 1] = kInf;
            }
            k = 0;
            for (int q = 0; q < n; ++q) {
                while (zb[k + 1] < q) ++k;
                out[q] = sq(q - v[k]) + row[v[k]];
            }
        };

        for (int j = 0; j < ny_; ++j) {
            for (int i = 0; i < nx_; ++i) row[i] = f[index(i, j)];
            transform_1d(nx_);
            for (int i = 0; i < nx_; ++i) f[index(i, j)] = out[i];
        }
        for (int i = 0; i < nx_; ++i) {
            for (int j = 0; j < ny_; ++j) row[j] = f[index(i, j)];
            transform_1d(ny_);
            for (int j = 0; j < ny_; ++j) f[index(i, j)] = out[j];
        }
        return f;
    }

    /// Distance (world units) from each inside cell center to the nearest
    /// exterior cell center, shifted half a cell inward so that the zero level
    /// sits near the true boundary. Error <= h.
    std::vector<double> clearance_field() const {
        std::vector<std::uint8_t> ext(size());
        for (std::size_t k = 0; k < size(); ++k) ext[k] = cells_[k] ? 0 : 1;
        // Frame counts as exterior: pad by treating out-of-grid as exterior.
        auto d2 = squared_distance_to(ext);
        std::vector<double> d(size(), 0.0);
        for (int j = 0; j < ny_; ++j)
            for (int i = 0; i < nx_; ++i) {
                std::size_t k = index(i, j);
                if (!cells_[k]) continue;
                double cell_dist = std::sqrt(d2[k]);
                double frame = 1.0 + std::min(std::min(i, nx_ - 1 - i), std::min(j, ny_ - 1 - j));
                cell_dist = std::min(cell_dist, frame);
                d[k] = std::max(h_ * cell_dist - 0.5 * h_, 0.25 * h_);
            }
        return d;
    }

    /// 8-connected component labels over cells satisfying `pred(i,j)`.
    /// Labels are 0..count-1 in row-major order of first appearance;
    /// cells failing pred get -1.
    std::pair<std::vector<std::int32_t>, int>
    label_components(const std::function<bool(int, int)>& pred) const {
        disjoint_set ds(size());
        std::vector<std::uint8_t> ok(size(), 0);
        for (int j = 0; j < ny_; ++j)
            for (int i = 0; i < nx_; ++i)
                ok[index(i, j)] = pred(i, j) ? 1 : 0;
        for (int j = 0; j < ny_; ++j)
            for (int i = 0; i < nx_; ++i) {
                std::size_t k = index(i, j);
                if (!ok[k]) continue;
                const int di[4] = {1, -1, 0, 1};
                const int dj[4] = {0, 1, 1, 1};
                for (int t = 0; t < 4; ++t) {
                    int a = i + di[t], b = j + dj[t];
                    if (in_grid(a, b) && ok[index(a, b)])
                        ds.unite(static_cast<std::uint32_t>(k),
                                 static_cast<std::uint32_t>(index(a, b)));
                }
            }
        std::vector<std::int32_t> labels(size(), -1);
        std::vector<std::int32_t> remap(size(), -1);
        int count = 0;
        for (std::size_t k = 0; k < size(); ++k) {
            if (!ok[k]) continue;
            std::uint32_t r = ds.find(static_cast<std::uint32_t>(k));
            if (remap[r] < 0) remap[r] = count++;
            labels[k] = remap[r];
        }
        return {std::move(labels), count};
    }

    /// P5 PGM, maxval 255, 255 = inside. Row 0 of the file is the top of the
    /// image (largest imaginary part).
    void write_pgm(const std::string& path) const {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("write_pgm: cannot open " + path);
        os << "P5\n" << nx_ << " " << ny_ << "\n255\n";
        for (int j = ny_ - 1; j >= 0; --j)
            for (int i = 0; i < nx_; ++i)
                os.put(at(i, j) ? static_cast<char>(255) : static_cast<char>(0));
    }

  private:
    int nx_ = 0, ny_ = 0;
    cplx origin_{0, 0};
    double h_ = 1.0;
    std::vector<std::uint8_t> cells_;
};

}  // namespace kobgeo
