#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "vawt/morphology.hpp"

namespace vawt {

struct TriMesh {
    std::vector<std::array<double, 3>> vertices;       // mm
    std::vector<std::array<std::uint32_t, 3>> tris;    // outward CCW winding
    bool operator==(const TriMesh&) const = default;
};

// Exposed-face extraction with topology-aware vertex construction: every quad
// edge is paired with exactly one partner face (convex, flat or concave turn),
// and vertices are the union-find orbits of face corners under those pairings.
// Lattice corners where the surface only pinches (cubes touching along an edge
// or corner) therefore yield separate mesh vertices and the result is always a
// closed 2-manifold. Throws std::invalid_argument on an empty grid.
TriMesh extract_surface(const VoxelGrid& grid);

// Synchronous uniform Laplacian smoothing: each step moves every vertex to the
// arithmetic mean of its edge-connected neighbours. Connectivity is unchanged.
TriMesh smooth(const TriMesh& mesh, int steps = 50);

// Every undirected edge in exactly two triangles and every directed edge used
// exactly once (consistent orientation).
bool is_closed_manifold(const TriMesh& mesh);

std::int64_t euler_characteristic(const TriMesh& mesh);  // V - E + F

double signed_volume(const TriMesh& mesh);  // mm^3, positive for outward winding

struct Box3 {
    std::array<double, 3> lo{}, hi{};
};
Box3 bounding_box(const TriMesh& mesh);

std::vector<std::vector<std::uint32_t>> vertex_adjacency(const TriMesh& mesh);

}  // namespace vawt
