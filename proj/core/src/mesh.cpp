#include "erem/mesh.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace erem {

namespace {

double edge_length(const Mesh& m, int a, int b) {
    const double dx = m.nodes[a][0] - m.nodes[b][0];
    const double dy = m.nodes[a][1] - m.nodes[b][1];
    return std::sqrt(dx * dx + dy * dy);
}

double max_edge_length(const Mesh& m) {
    double h = 0.0;
    for (int e = 0; e < m.n_elements(); ++e) {
        const int* v = m.element(e);
        if (m.dim == 1) {
            h = std::max(h, edge_length(m, v[0], v[1]));
        } else {
            h = std::max({h, edge_length(m, v[0], v[1]), edge_length(m, v[1], v[2]),
                          edge_length(m, v[2], v[0])});
        }
    }
    return h;
}

} // namespace

double Mesh::element_measure(int e) const {
    const int* v = element(e);
    if (dim == 1) return std::abs(nodes[v[1]][0] - nodes[v[0]][0]);
    const auto& p0 = nodes[v[0]];
    const auto& p1 = nodes[v[1]];
    const auto& p2 = nodes[v[2]];
    return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
}

Mesh build_interval_mesh(double a, double b, int n) {
    if (a >= b) throw std::invalid_argument("build_interval_mesh: invalid-range (a >= b)");
    if (n < 1) throw std::invalid_argument("build_interval_mesh: invalid-size (n = 0)");
    Mesh m;
    m.dim = 1;
    m.nodes.resize(n + 1);
    for (int i = 0; i <= n; ++i) m.nodes[i] = {a + (b - a) * i / n, 0.0};
    m.elem_nodes.reserve(2 * n);
    for (int i = 0; i < n; ++i) {
        m.elem_nodes.push_back(i);
        m.elem_nodes.push_back(i + 1);
    }
    m.facet_nodes = {0, n};
    m.facet_markers = {0, 1};
    m.h = max_edge_length(m);
    return m;
}

Mesh build_rect_mesh(int nx, int ny, std::array<double, 2> lo, std::array<double, 2> hi) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("build_rect_mesh: invalid-size");
    if (!(lo[0] < hi[0]) || !(lo[1] < hi[1]))
        throw std::invalid_argument("build_rect_mesh: degenerate-rectangle");
    Mesh m;
    m.dim = 2;
    const int npx = nx + 1;
    m.nodes.resize(static_cast<std::size_t>(npx) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            m.nodes[j * npx + i] = {lo[0] + (hi[0] - lo[0]) * i / nx,
                                    lo[1] + (hi[1] - lo[1]) * j / ny};

    auto vid = [npx](int i, int j) { return j * npx + i; };
    m.elem_nodes.reserve(6 * nx * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int v00 = vid(i, j), v10 = vid(i + 1, j);
            const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            // fixed lower-left to upper-right diagonal
            m.elem_nodes.insert(m.elem_nodes.end(), {v00, v10, v11});
            m.elem_nodes.insert(m.elem_nodes.end(), {v00, v11, v01});
        }
    }
    for (int i = 0; i < nx; ++i) { // bottom
        m.facet_nodes.insert(m.facet_nodes.end(), {vid(i, 0), vid(i + 1, 0)});
        m.facet_markers.push_back(0);
    }
    for (int j = 0; j < ny; ++j) { // right
        m.facet_nodes.insert(m.facet_nodes.end(), {vid(nx, j), vid(nx, j + 1)});
        m.facet_markers.push_back(1);
    }
    for (int i = 0; i < nx; ++i) { // top
        m.facet_nodes.insert(m.facet_nodes.end(), {vid(i + 1, ny), vid(i, ny)});
        m.facet_markers.push_back(2);
    }
    for (int j = 0; j < ny; ++j) { // left
        m.facet_nodes.insert(m.facet_nodes.end(), {vid(0, j + 1), vid(0, j)});
        m.facet_markers.push_back(3);
    }
    m.h = max_edge_length(m);
    return m;
}

Mesh refine_uniform(const Mesh& m) {
    if (m.n_elements() == 0) throw std::invalid_argument("refine_uniform: empty mesh");
    Mesh r;
    r.dim = m.dim;
    r.nodes = m.nodes;
    r.parent_edge.resize(m.n_nodes());
    for (int i = 0; i < m.n_nodes(); ++i) r.parent_edge[i] = {i, i};

    std::map<std::pair<int, int>, int> midpoint; // edge (sorted) -> new node
    auto mid = [&](int a, int b) {
        auto key = std::minmax(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const int idx = r.n_nodes();
        r.nodes.push_back({0.5 * (m.nodes[a][0] + m.nodes[b][0]),
                           0.5 * (m.nodes[a][1] + m.nodes[b][1])});
        r.parent_edge.push_back({key.first, key.second});
        midpoint.emplace(key, idx);
        return idx;
    };

    if (m.dim == 1) {
        for (int e = 0; e < m.n_elements(); ++e) {
            const int* v = m.element(e);
            const int c = mid(v[0], v[1]);
            r.elem_nodes.insert(r.elem_nodes.end(), {v[0], c, c, v[1]});
        }
        r.facet_nodes = m.facet_nodes;
        r.facet_markers = m.facet_markers;
    } else {
        for (int e = 0; e < m.n_elements(); ++e) {
            const int* v = m.element(e);
            const int m01 = mid(v[0], v[1]);
            const int m12 = mid(v[1], v[2]);
            const int m20 = mid(v[2], v[0]);
            r.elem_nodes.insert(r.elem_nodes.end(), {v[0], m01, m20});
            r.elem_nodes.insert(r.elem_nodes.end(), {v[1], m12, m01});
            r.elem_nodes.insert(r.elem_nodes.end(), {v[2], m20, m12});
            r.elem_nodes.insert(r.elem_nodes.end(), {m01, m12, m20});
        }
        for (int f = 0; f < m.n_facets(); ++f) {
            const int* fn = m.facet(f);
            const int c = mid(fn[0], fn[1]);
            r.facet_nodes.insert(r.facet_nodes.end(), {fn[0], c});
            r.facet_markers.push_back(m.facet_markers[f]);
            r.facet_nodes.insert(r.facet_nodes.end(), {c, fn[1]});
            r.facet_markers.push_back(m.facet_markers[f]);
        }
    }
    r.h = max_edge_length(r);
    return r;
}

double total_measure(const Mesh& m) {
    double s = 0.0;
    for (int e = 0; e < m.n_elements(); ++e) s += m.element_measure(e);
    return s;
}

void dump_mesh(const Mesh& m, std::ostream& os) {
    os << m.dim << ' ' << m.n_nodes() << ' ' << m.n_elements() << ' ' << m.n_facets() << '\n';
    for (const auto& p : m.nodes) {
        os << p[0];
        if (m.dim == 2) os << ' ' << p[1];
        os << '\n';
    }
    for (int e = 0; e < m.n_elements(); ++e) {
        const int* v = m.element(e);
        for (int k = 0; k < m.verts_per_elem(); ++k) os << (k ? " " : "") << v[k];
        os << '\n';
    }
    for (int f = 0; f < m.n_facets(); ++f) {
        const int* v = m.facet(f);
        for (int k = 0; k < m.dim; ++k) os << v[k] << ' ';
        os << m.facet_markers[f] << '\n';
    }
}

} // namespace erem
