#include "vawt/mesh.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace vawt {

namespace {

struct IVec {
    int x, y, z;
    IVec operator+(const IVec& o) const { return {x + o.x, y + o.y, z + o.z}; }
    IVec operator-(const IVec& o) const { return {x - o.x, y - o.y, z - o.z}; }
    IVec operator-() const { return {-x, -y, -z}; }
    bool operator==(const IVec&) const = default;
};

constexpr IVec kDir[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};

int dir_index(const IVec& d) {
    for (int i = 0; i < 6; ++i)
        if (kDir[i] == d) return i;
    throw std::logic_error("not an axis direction");
}

// Corner offsets per face direction, CCW seen from outside the cell.
constexpr IVec kCorner[6][4] = {
    {{1, 0, 0}, {1, 1, 0}, {1, 1, 1}, {1, 0, 1}},  // +x
    {{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {0, 1, 0}},  // -x
    {{0, 1, 0}, {0, 1, 1}, {1, 1, 1}, {1, 1, 0}},  // +y
    {{0, 0, 0}, {1, 0, 0}, {1, 0, 1}, {0, 0, 1}},  // -y
    {{0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}},  // +z
    {{0, 0, 0}, {0, 1, 0}, {1, 1, 0}, {1, 0, 0}},  // -z
};

IVec cross(const IVec& a, const IVec& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

struct UnionFind {
    std::vector<std::int32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<std::int32_t>(i);
    }
    std::int32_t find(std::int32_t a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
    void unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

TriMesh extract_surface(const VoxelGrid& grid) {
    auto filled = [&grid](const IVec& c) {
        return grid.in_bounds(c.x, c.y, c.z) && grid.at(c.x, c.y, c.z);
    };

    struct Face {
        IVec cell;
        int dir;
    };
    std::vector<Face> faces;
    std::vector<std::int32_t> face_id(static_cast<std::size_t>(kGridN) * kGridN * kGridN * 6, -1);
    auto face_slot = [](const IVec& c, int d) {
        return (static_cast<std::size_t>(c.x + kGridN * (c.y + kGridN * c.z))) * 6 + d;
    };

    for (int z = 0; z < kGridN; ++z)
        for (int y = 0; y < kGridN; ++y)
            for (int x = 0; x < kGridN; ++x) {
                IVec cell{x, y, z};
                if (!filled(cell)) continue;
                for (int d = 0; d < 6; ++d)
                    if (!filled(cell + kDir[d])) {
                        face_id[face_slot(cell, d)] = static_cast<std::int32_t>(faces.size());
                        faces.push_back({cell, d});
                    }
            }
    if (faces.empty()) throw std::invalid_argument("cannot extract surface of an empty grid");

    // Absolute lattice corner of face f, corner index k.
    auto corner_of = [&](std::int32_t f, int k) { return faces[f].cell + kCorner[faces[f].dir][k]; };

    // Can the two diagonal cells of a checkerboard edge reach each other
    // through filled cells among the 8 touching this lattice corner?
    auto solids_linked_at = [&](const IVec& corner, const IVec& c1, const IVec& c2) {
        bool fill[8];
        int from = -1, to = -1;
        for (int i = 0; i < 8; ++i) {
            IVec cell{corner.x - 1 + (i & 1), corner.y - 1 + ((i >> 1) & 1),
                      corner.z - 1 + (i >> 2)};
            fill[i] = filled(cell);
            if (cell == c1) from = i;
            if (cell == c2) to = i;
        }
        bool seen[8] = {};
        int stack[8];
        int top = 0;
        stack[top++] = from;
        seen[from] = true;
        while (top) {
            int i = stack[--top];
            if (i == to) return true;
            for (int b = 0; b < 3; ++b) {
                int j = i ^ (1 << b);
                if (!seen[j] && fill[j]) {
                    seen[j] = true;
                    stack[top++] = j;
                }
            }
        }
        return false;
    };

    // Partner face across the edge leaving corner k (edge k -> k+1) of face f.
    //
    // The convex/flat/concave cases are forced. A checkerboard edge (side
    // empty, diagonal filled) has two resolutions: cut (turn on this cell,
    // treating the diagonal solids as separate) or join (pair across to the
    // diagonal cell). For the triangle mesh to stay manifold, the two surface
    // crossings must end up on distinct vertices at one endpoint at least.
    // Cutting splits a corner's fans whenever the solids don't link up around
    // it; joining splits whenever the empty wedges don't. The two conditions
    // are mutually exclusive per corner, so: join when the solids link around
    // both endpoints (cut would pinch), cut otherwise (safe at the unlinked
    // endpoint).
    auto partner_of = [&](std::int32_t f) {
        const Face& face = faces[f];
        std::array<std::int32_t, 4> out;
        for (int k = 0; k < 4; ++k) {
            IVec a = kCorner[face.dir][k];
            IVec b = kCorner[face.dir][(k + 1) % 4];
            IVec u = cross(b - a, kDir[face.dir]);  // in-plane outward edge normal
            IVec side = face.cell + u;
            IVec diag = side + kDir[face.dir];
            std::int32_t p;
            if (filled(side))
                p = filled(diag) ? face_id[face_slot(diag, dir_index(-u))]
                                 : face_id[face_slot(side, face.dir)];
            else if (filled(diag) && solids_linked_at(face.cell + a, face.cell, diag) &&
                     solids_linked_at(face.cell + b, face.cell, diag))
                p = face_id[face_slot(diag, dir_index(-u))];
            else
                p = face_id[face_slot(face.cell, dir_index(u))];
            out[k] = p;
        }
        return out;
    };

    UnionFind orbits(faces.size() * 4);
    for (std::int32_t f = 0; f < static_cast<std::int32_t>(faces.size()); ++f) {
        auto partners = partner_of(f);
        for (int k = 0; k < 4; ++k) {
            std::int32_t g = partners[k];
            IVec pa = corner_of(f, k);
            IVec pb = corner_of(f, (k + 1) % 4);
            for (int j = 0; j < 4; ++j) {
                IVec c = corner_of(g, j);
                if (c == pa) orbits.unite(4 * f + k, 4 * g + j);
                if (c == pb) orbits.unite(4 * f + (k + 1) % 4, 4 * g + j);
            }
        }
    }

    TriMesh mesh;
    std::vector<std::int32_t> orbit_vertex(faces.size() * 4, -1);
    auto vertex_of = [&](std::int32_t f, int k) {
        std::int32_t root = orbits.find(4 * f + k);
        if (orbit_vertex[root] < 0) {
            orbit_vertex[root] = static_cast<std::int32_t>(mesh.vertices.size());
            IVec c = corner_of(f, k);
            mesh.vertices.push_back({c.x * kVoxelPitchMm, c.y * kVoxelPitchMm, c.z * kVoxelPitchMm});
        }
        return static_cast<std::uint32_t>(orbit_vertex[root]);
    };

    mesh.tris.reserve(faces.size() * 2);
    for (std::int32_t f = 0; f < static_cast<std::int32_t>(faces.size()); ++f) {
        std::uint32_t v0 = vertex_of(f, 0), v1 = vertex_of(f, 1), v2 = vertex_of(f, 2),
                      v3 = vertex_of(f, 3);
        mesh.tris.push_back({v0, v1, v2});
        mesh.tris.push_back({v0, v2, v3});
    }
    return mesh;
}

std::vector<std::vector<std::uint32_t>> vertex_adjacency(const TriMesh& mesh) {
    std::vector<std::vector<std::uint32_t>> adj(mesh.vertices.size());
    for (const auto& t : mesh.tris)
        for (int i = 0; i < 3; ++i) {
            std::uint32_t a = t[i], b = t[(i + 1) % 3];
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
    for (auto& n : adj) {
        std::sort(n.begin(), n.end());
        n.erase(std::unique(n.begin(), n.end()), n.end());
    }
    return adj;
}

TriMesh smooth(const TriMesh& mesh, int steps) {
    TriMesh out = mesh;
    if (steps <= 0 || mesh.vertices.empty()) return out;
    auto adj = vertex_adjacency(mesh);
    std::vector<std::array<double, 3>> next(out.vertices.size());
    for (int step = 0; step < steps; ++step) {
        const auto& cur = out.vertices;
#pragma omp parallel for schedule(static)
        for (std::int64_t v = 0; v < static_cast<std::int64_t>(cur.size()); ++v) {
            const auto& n = adj[static_cast<std::size_t>(v)];
            if (n.empty()) {
                next[v] = cur[v];
                continue;
            }
            double sx = 0, sy = 0, sz = 0;
            for (std::uint32_t w : n) {
                sx += cur[w][0];
                sy += cur[w][1];
                sz += cur[w][2];
            }
            double inv = 1.0 / static_cast<double>(n.size());
            next[v] = {sx * inv, sy * inv, sz * inv};
        }
        out.vertices.swap(next);
    }
    return out;
}

namespace {

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

bool is_closed_manifold(const TriMesh& mesh) {
    // One sorted pass: pack each half-edge as undirected key + direction bit
    // (vertex indices stay far below 2^31 here) and require every undirected
    // edge to appear exactly twice, once per direction.
    std::vector<std::uint64_t> keys;
    keys.reserve(mesh.tris.size() * 3);
    for (const auto& t : mesh.tris)
        for (int i = 0; i < 3; ++i) {
            std::uint32_t a = t[i], b = t[(i + 1) % 3];
            if (a == b) return false;
            keys.push_back((edge_key(a, b) << 1) | (a > b ? 1 : 0));
        }
    std::sort(keys.begin(), keys.end());
    if (keys.size() % 2 != 0) return false;
    for (std::size_t i = 0; i + 1 < keys.size(); i += 2) {
        if ((keys[i] >> 1) != (keys[i + 1] >> 1)) return false;   // unpaired edge
        if ((keys[i] & 1) != 0 || (keys[i + 1] & 1) != 1) return false;  // same winding
        if (i + 2 < keys.size() && (keys[i + 2] >> 1) == (keys[i] >> 1)) return false;
    }
    return true;
}

std::int64_t euler_characteristic(const TriMesh& mesh) {
    std::unordered_map<std::uint64_t, int> edges;
    edges.reserve(mesh.tris.size() * 3);
    for (const auto& t : mesh.tris)
        for (int i = 0; i < 3; ++i) ++edges[edge_key(t[i], t[(i + 1) % 3])];
    return static_cast<std::int64_t>(mesh.vertices.size()) -
           static_cast<std::int64_t>(edges.size()) +
           static_cast<std::int64_t>(mesh.tris.size());
}

double signed_volume(const TriMesh& mesh) {
    double vol = 0;
    for (const auto& t : mesh.tris) {
        const auto& a = mesh.vertices[t[0]];
        const auto& b = mesh.vertices[t[1]];
        const auto& c = mesh.vertices[t[2]];
        vol += a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
               a[2] * (b[0] * c[1] - b[1] * c[0]);
    }
    return vol / 6.0;
}

Box3 bounding_box(const TriMesh& mesh) {
    Box3 box;
    if (mesh.vertices.empty()) return box;
    box.lo = box.hi = mesh.vertices[0];
    for (const auto& v : mesh.vertices)
        for (int i = 0; i < 3; ++i) {
            box.lo[i] = std::min(box.lo[i], v[i]);
            box.hi[i] = std::max(box.hi[i], v[i]);
        }
    return box;
}

}  // namespace vawt
