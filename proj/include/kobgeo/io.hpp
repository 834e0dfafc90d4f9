#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "kobgeo/core.hpp"

namespace kobgeo {

inline std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}
inline std::string fmt_fixed6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

/// Comma-separated values: '.' decimal, header row, LF line endings.
inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_csv: cannot open " + path);
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << "\n";
    }
}

/// Deterministic SVG canvas: fixed 800x800 viewport, 6-decimal coordinates.
class SvgCanvas {
  public:
    SvgCanvas(cplx lo, cplx hi) : lo_(lo), hi_(hi) {
        body_ += "<rect width=\"800\" height=\"800\" fill=\"white\"/>\n";
    }

    void polyline(const std::vector<cplx>& pts, const std::string& color, double width_px = 1.0) {
        if (pts.size() < 2) return;
        body_ += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
                 fmt_fixed6(width_px) + "\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            auto [x, y] = map(pts[i]);
            body_ += (i ? " " : "") + fmt_fixed6(x) + "," + fmt_fixed6(y);
        }
        body_ += "\"/>\n";
    }

    void circle(cplx center, double world_radius, const std::string& stroke,
                const std::string& fill = "none", double width_px = 1.0) {
        auto [x, y] = map(center);
        body_ += "<circle cx=\"" + fmt_fixed6(x) + "\" cy=\"" + fmt_fixed6(y) + "\" r=\"" +
                 fmt_fixed6(world_radius * scale()) + "\" stroke=\"" + stroke + "\" fill=\"" +
                 fill + "\" stroke-width=\"" + fmt_fixed6(width_px) + "\"/>\n";
    }

    void dot(cplx center, double px_radius, const std::string& color) {
        auto [x, y] = map(center);
        body_ += "<circle cx=\"" + fmt_fixed6(x) + "\" cy=\"" + fmt_fixed6(y) + "\" r=\"" +
                 fmt_fixed6(px_radius) + "\" fill=\"" + color + "\"/>\n";
    }

    void save(const std::string& path) const {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("SvgCanvas: cannot open " + path);
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
              "viewBox=\"0 0 800 800\">\n"
           << body_ << "</svg>\n";
    }

  private:
    double scale() const {
        double w = std::max(hi_.real() - lo_.real(), hi_.imag() - lo_.imag());
        return 800.0 / w;
    }
    std::pair<double, double> map(cplx z) const {
        double s = scale();
        return {(z.real() - lo_.real()) * s, 800.0 - (z.imag() - lo_.imag()) * s};
    }

    cplx lo_, hi_;
    std::string body_;
};

/// FNV-1a 64-bit, used for the config hash in the manifest.
inline std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace kobgeo
