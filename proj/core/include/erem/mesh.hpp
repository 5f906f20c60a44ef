#pragma once

#include <array>
#include <ostream>
#include <vector>

namespace erem {

/// Simplicial mesh of an interval (dim = 1) or an axis-aligned rectangle
/// (dim = 2, each cell split along the lower-left/upper-right diagonal).
/// Immutable after construction; safe to share between threads.
struct Mesh {
    int dim = 1;
    std::vector<std::array<double, 2>> nodes; // y unused in 1D
    std::vector<int> elem_nodes;              // flattened, dim+1 indices per element
    std::vector<int> facet_nodes;             // flattened, dim indices per boundary facet
    std::vector<int> facet_markers;           // one marker per facet (side id)
    double h = 0.0;                           // maximal edge length

    // For meshes produced by refine_uniform: node i of this mesh interpolates
    // the parent-mesh nodes parent_edge[i] with equal weights (both entries
    // coincide for carried-over nodes). Empty for directly built meshes.
    std::vector<std::array<int, 2>> parent_edge;

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    int verts_per_elem() const { return dim + 1; }
    int n_elements() const { return static_cast<int>(elem_nodes.size()) / verts_per_elem(); }
    int n_facets() const { return static_cast<int>(facet_markers.size()); }

    const int* element(int e) const { return elem_nodes.data() + e * verts_per_elem(); }
    const int* facet(int f) const { return facet_nodes.data() + f * dim; }

    /// Length (1D) or area (2D) of element e.
    double element_measure(int e) const;
};

/// n equally spaced elements on [a, b]; boundary markers 0 (left), 1 (right).
Mesh build_interval_mesh(double a, double b, int n);

/// Structured triangulation of the rectangle [lo.x, hi.x] x [lo.y, hi.y] with
/// nx * ny cells, two positively oriented triangles each. Boundary markers:
/// 0 bottom, 1 right, 2 top, 3 left.
Mesh build_rect_mesh(int nx, int ny, std::array<double, 2> lo, std::array<double, 2> hi);

/// Uniform refinement: bisection in 1D, red refinement (4 similar children)
/// in 2D. Parent node coordinates and indices are preserved; h halves.
Mesh refine_uniform(const Mesh& m);

/// Sum of element measures.
double total_measure(const Mesh& m);

/// Plain-text dump: "dim n_nodes n_elements n_facets" header, then node
/// coordinates, element node indices (0-based), facet indices with marker.
void dump_mesh(const Mesh& m, std::ostream& os);

} // namespace erem
