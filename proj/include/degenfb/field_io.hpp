#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "degenfb/grid.hpp"

namespace degenfb {

namespace detail {

inline std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace detail

/// CSV serialization: header `x,value` (1D) or `x,y,value` (2D), one row per
/// node, row-major (x fastest). 17 significant digits make the round trip
/// lossless for doubles.
inline void write_field_csv(const ScalarField& f, std::ostream& os) {
    const Grid& g = f.grid;
    os << (g.dim == 2 ? "x,y,value\n" : "x,value\n");
    for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i) {
            const auto p = g.point(i, j);
            os << detail::fmt17(p[0]);
            if (g.dim == 2) os << ',' << detail::fmt17(p[1]);
            os << ',' << detail::fmt17(f[g.index(i, j)]) << '\n';
        }
}

inline void write_field_csv(const ScalarField& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw numerical_error("cannot open for writing: " + path);
    write_field_csv(f, os);
}

/// Reads a field written by write_field_csv; the grid is reconstructed from
/// the coordinate columns.
inline ScalarField read_field_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw precondition_error("field csv: empty input");
    const int dim = line == "x,y,value" ? 2 : (line == "x,value" ? 1 : 0);
    require(dim != 0, "field csv: unrecognized header '" + line + "'");

    std::vector<double> xs, ys, vals;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        double col[3] = {0, 0, 0};
        int k = 0;
        while (std::getline(ls, tok, ',') && k < 3) col[k++] = std::stod(tok);
        require(k == dim + 1, "field csv: malformed row '" + line + "'");
        xs.push_back(col[0]);
        if (dim == 2) ys.push_back(col[1]);
        vals.push_back(col[dim]);
    }
    require(!vals.empty(), "field csv: no data rows");

    int nx;
    if (dim == 1) {
        nx = static_cast<int>(vals.size());
    } else {
        nx = 0;
        while (nx < static_cast<int>(xs.size()) && ys[static_cast<std::size_t>(nx)] == ys[0]) ++nx;
    }
    const int total = static_cast<int>(vals.size());
    require(nx > 0 && total % nx == 0, "field csv: rows do not form a lattice");
    const int ny = total / nx;

    Grid g = dim == 1 ? Grid::make1d(xs.front(), xs.back(), nx)
                      : Grid::make2d(xs.front(), ys.front(), xs[static_cast<std::size_t>(nx - 1)],
                                     ys.back(), nx, ny);
    ScalarField f(g);
    for (int idx = 0; idx < total; ++idx) f[idx] = vals[static_cast<std::size_t>(idx)];
    return f;
}

inline ScalarField read_field_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw precondition_error("cannot open field csv: " + path);
    return read_field_csv(is);
}

}  // namespace degenfb
