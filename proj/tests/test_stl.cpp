#include <cstring>
#include <filesystem>
#include <set>

#include "doctest.h"
#include "vawt/mesh.hpp"
#include "vawt/rng.hpp"
#include "vawt/stl_io.hpp"

using namespace vawt;

namespace {

TriMesh cube_mesh() {
    VoxelGrid g;
    g.set(10, 20, 30, true);
    return extract_surface(g);
}

// Triangle soup as float32, the representation STL actually stores.
std::vector<std::array<float, 9>> soup(const TriMesh& m) {
    std::vector<std::array<float, 9>> out;
    out.reserve(m.tris.size());
    for (const auto& t : m.tris) {
        std::array<float, 9> tri;
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k)
                tri[3 * i + k] = static_cast<float>(m.vertices[t[i]][k]);
        out.push_back(tri);
    }
    return out;
}

}  // namespace

TEST_CASE("binary STL of a cube is exactly 684 bytes with the documented layout") {
    TriMesh m = cube_mesh();
    std::string bytes = write_stl(m, StlFormat::binary);
    REQUIRE(bytes.size() == 84 + 12 * 50);
    CHECK(bytes.compare(0, 5, "solid") != 0);
    std::uint32_t count = 0;
    std::memcpy(&count, bytes.data() + 80, 4);
    CHECK(count == 12);

    // Byte-determinism: rewriting the same mesh reproduces the same bytes.
    CHECK(write_stl(m, StlFormat::binary) == bytes);
    CHECK(write_stl(m, StlFormat::ascii) == write_stl(m, StlFormat::ascii));
}

TEST_CASE("ascii STL is a well-formed solid block") {
    std::string text = write_stl(cube_mesh(), StlFormat::ascii);
    CHECK(text.rfind("solid", 0) == 0);
    CHECK(text.find("facet normal") != std::string::npos);
    CHECK(text.find("outer loop") != std::string::npos);
    CHECK(text.rfind("endsolid vawt\n") == text.size() - 14);
}

TEST_CASE("both formats round-trip the triangle soup exactly") {
    Rng rng(53);
    Genotype gen = random_genotype(rng, GenomeMode::z_varying);
    TriMesh m = smooth(extract_surface(build_grid(gen)), 10);

    for (StlFormat f : {StlFormat::binary, StlFormat::ascii}) {
        TriMesh back = read_stl(write_stl(m, f));
        REQUIRE(back.tris.size() == m.tris.size());
        CHECK(soup(back) == soup(m));
    }
}

TEST_CASE("binary and ascii readers agree bit for bit") {
    Rng rng(59);
    Genotype gen = random_genotype(rng, GenomeMode::flat);
    TriMesh m = smooth(extract_surface(build_grid(gen)), 5);
    TriMesh from_binary = read_stl(write_stl(m, StlFormat::binary));
    TriMesh from_ascii = read_stl(write_stl(m, StlFormat::ascii));
    CHECK(from_binary == from_ascii);
}

TEST_CASE("read-write stabilizes after one float32 quantization") {
    Rng rng(61);
    Genotype gen = random_genotype(rng, GenomeMode::flat);
    TriMesh m = smooth(extract_surface(build_grid(gen)), 50);
    TriMesh once = read_stl(write_stl(m, StlFormat::binary));
    TriMesh twice = read_stl(write_stl(once, StlFormat::binary));
    CHECK(once == twice);
    CHECK(write_stl(once, StlFormat::binary) == write_stl(twice, StlFormat::binary));
}

TEST_CASE("the reader merges vertices by exact coordinate") {
    // Pinched shapes carry duplicate coordinates in the mesh; the reader folds
    // them back together (losing the manifold property at the pinch, which is
    // an STL container limitation, not a meshing bug).
    VoxelGrid g;
    g.set(5, 5, 5, true);
    g.set(6, 6, 5, true);
    TriMesh m = extract_surface(g);
    REQUIRE(m.vertices.size() == 16);
    CHECK(is_closed_manifold(m));

    TriMesh back = read_stl(write_stl(m, StlFormat::binary));
    CHECK(back.tris.size() == 24);
    CHECK(back.vertices.size() == 14);
    CHECK_FALSE(is_closed_manifold(back));

    std::set<std::array<double, 3>> coords(back.vertices.begin(), back.vertices.end());
    CHECK(coords.size() == back.vertices.size());
}

TEST_CASE("an empty mesh round-trips in both formats") {
    TriMesh empty;
    std::string bin = write_stl(empty, StlFormat::binary);
    CHECK(bin.size() == 84);
    CHECK(read_stl(bin) == empty);
    CHECK(read_stl(write_stl(empty, StlFormat::ascii)) == empty);
}

TEST_CASE("truncated binary input reports the byte offset") {
    std::string bytes = write_stl(cube_mesh(), StlFormat::binary);
    CHECK_THROWS_AS(read_stl(bytes.substr(0, 50)), StlParseError);
    try {
        read_stl(bytes.substr(0, 200));
        FAIL("expected StlParseError");
    } catch (const StlParseError& e) {
        CHECK(e.offset == 200);
        CHECK(std::string(e.what()).find("684") != std::string::npos);
    }
}

TEST_CASE("malformed ascii input reports the byte offset") {
    CHECK_THROWS_AS(read_stl("solid x\nfacet mangled 0 0 0\n"), StlParseError);
    CHECK_THROWS_AS(read_stl("solid x\nfacet normal 0 0 zebra\n"), StlParseError);
    CHECK_THROWS_AS(read_stl("solid x\n"), StlParseError);  // missing endsolid
}

TEST_CASE("file helpers write and read the same mesh") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "vawt_stl_test";
    fs::create_directories(dir);
    TriMesh m = cube_mesh();

    fs::path bin = dir / "cube.stl";
    write_stl_file(bin, m, StlFormat::binary);
    CHECK(fs::file_size(bin) == 684);
    CHECK(soup(read_stl_file(bin)) == soup(m));

    fs::path asc = dir / "cube_ascii.stl";
    write_stl_file(asc, m, StlFormat::ascii);
    CHECK(soup(read_stl_file(asc)) == soup(m));

    CHECK_THROWS(read_stl_file(dir / "missing.stl"));
    fs::remove_all(dir);
}
