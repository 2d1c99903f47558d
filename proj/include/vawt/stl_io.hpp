#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "vawt/mesh.hpp"

namespace vawt {

enum class StlFormat { binary, ascii };

struct StlParseError : std::runtime_error {
    StlParseError(std::size_t offset, const std::string& what)
        : std::runtime_error("STL parse error at byte " + std::to_string(offset) + ": " + what),
          offset(offset) {}
    std::size_t offset;
};

// Binary: 80-byte header (never starts with "solid"), little-endian uint32
// triangle count, then 50 bytes per triangle (float32 normal + 3 vertices,
// uint16 attribute 0). Normals are recomputed from the wound vertices.
// Byte-deterministic for a given mesh.
std::string write_stl(const TriMesh& mesh, StlFormat format);

// Accepts both formats (ASCII detected by a leading "solid"); vertices are
// re-merged by exact coordinate. Stored normals are ignored.
TriMesh read_stl(const std::string& bytes);

void write_stl_file(const std::filesystem::path& path, const TriMesh& mesh, StlFormat format);
TriMesh read_stl_file(const std::filesystem::path& path);

}  // namespace vawt
