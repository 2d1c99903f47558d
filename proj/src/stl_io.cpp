#include "vawt/stl_io.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_map>

namespace vawt {

namespace {

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

std::array<float, 3> face_normal(const TriMesh& mesh, std::size_t t) {
    const auto& a = mesh.vertices[mesh.tris[t][0]];
    const auto& b = mesh.vertices[mesh.tris[t][1]];
    const auto& c = mesh.vertices[mesh.tris[t][2]];
    double ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
    double vx = c[0] - a[0], vy = c[1] - a[1], vz = c[2] - a[2];
    double nx = uy * vz - uz * vy, ny = uz * vx - ux * vz, nz = ux * vy - uy * vx;
    double len = std::sqrt(nx * nx + ny * ny + nz * nz);
    if (len == 0) return {0.f, 0.f, 0.f};
    return {static_cast<float>(nx / len), static_cast<float>(ny / len),
            static_cast<float>(nz / len)};
}

void append_float_text(std::string& out, float v) {
    char buf[48];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

constexpr char kBinaryHeader[] = "vawt turbine surface (binary STL)";

}  // namespace

std::string write_stl(const TriMesh& mesh, StlFormat format) {
    std::string out;
    if (format == StlFormat::binary) {
        out.reserve(84 + mesh.tris.size() * 50);
        out.assign(kBinaryHeader);
        out.resize(80, '\0');
        put_u32(out, static_cast<std::uint32_t>(mesh.tris.size()));
        for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
            auto n = face_normal(mesh, t);
            for (float f : n) put_f32(out, f);
            for (int i = 0; i < 3; ++i)
                for (int k = 0; k < 3; ++k)
                    put_f32(out, static_cast<float>(mesh.vertices[mesh.tris[t][i]][k]));
            put_u16(out, 0);
        }
        return out;
    }
    out = "solid vawt\n";
    for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
        auto n = face_normal(mesh, t);
        out += "  facet normal ";
        for (int k = 0; k < 3; ++k) {
            if (k) out += ' ';
            append_float_text(out, n[k]);
        }
        out += "\n    outer loop\n";
        for (int i = 0; i < 3; ++i) {
            out += "      vertex ";
            for (int k = 0; k < 3; ++k) {
                if (k) out += ' ';
                append_float_text(out, static_cast<float>(mesh.vertices[mesh.tris[t][i]][k]));
            }
            out += '\n';
        }
        out += "    endloop\n  endfacet\n";
    }
    out += "endsolid vawt\n";
    return out;
}

namespace {

struct VertexMerger {
    TriMesh mesh;
    std::unordered_map<std::string, std::uint32_t> index;

    std::uint32_t add(float x, float y, float z) {
        std::string key(12, '\0');
        std::memcpy(key.data(), &x, 4);
        std::memcpy(key.data() + 4, &y, 4);
        std::memcpy(key.data() + 8, &z, 4);
        auto [it, fresh] = index.try_emplace(key, static_cast<std::uint32_t>(mesh.vertices.size()));
        if (fresh) mesh.vertices.push_back({x, y, z});
        return it->second;
    }
};

TriMesh read_stl_binary(const std::string& bytes) {
    if (bytes.size() < 84) throw StlParseError(bytes.size(), "truncated binary header");
    std::uint32_t count = 0;
    for (int i = 3; i >= 0; --i)
        count = (count << 8) | static_cast<std::uint8_t>(bytes[80 + i]);
    std::size_t need = 84 + static_cast<std::size_t>(count) * 50;
    if (bytes.size() < need)
        throw StlParseError(bytes.size(), "truncated triangle data (need " +
                                              std::to_string(need) + " bytes)");
    VertexMerger m;
    m.mesh.tris.reserve(count);
    std::size_t pos = 84;
    for (std::uint32_t t = 0; t < count; ++t) {
        pos += 12;  // stored normal ignored
        std::array<std::uint32_t, 3> idx;
        for (int i = 0; i < 3; ++i) {
            float c[3];
            std::memcpy(c, bytes.data() + pos, 12);
            pos += 12;
            idx[i] = m.add(c[0], c[1], c[2]);
        }
        pos += 2;  // attribute
        m.mesh.tris.push_back(idx);
    }
    return m.mesh;
}

struct AsciiScanner {
    const std::string& text;
    std::size_t pos = 0;

    std::string next_token() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        std::size_t start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        return text.substr(start, pos - start);
    }

    void expect(const char* word) {
        std::size_t before = pos;
        std::string tok = next_token();
        if (tok != word)
            throw StlParseError(before, std::string("expected '") + word + "', got '" + tok + "'");
    }

    float number() {
        std::size_t before = pos;
        std::string tok = next_token();
        if (tok.empty()) throw StlParseError(before, "expected number, got end of input");
        float v{};
        auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
            throw StlParseError(before, "bad number '" + tok + "'");
        return v;
    }
};

TriMesh read_stl_ascii(const std::string& bytes) {
    AsciiScanner s{bytes};
    s.expect("solid");
    // optional name: consume rest of first line
    while (s.pos < bytes.size() && bytes[s.pos] != '\n') ++s.pos;
    VertexMerger m;
    for (;;) {
        std::size_t before = s.pos;
        std::string tok = s.next_token();
        if (tok == "endsolid") break;
        if (tok != "facet")
            throw StlParseError(before, "expected 'facet' or 'endsolid', got '" + tok + "'");
        s.expect("normal");
        for (int k = 0; k < 3; ++k) s.number();
        s.expect("outer");
        s.expect("loop");
        std::array<std::uint32_t, 3> idx;
        for (int i = 0; i < 3; ++i) {
            s.expect("vertex");
            float x = s.number(), y = s.number(), z = s.number();
            idx[i] = m.add(x, y, z);
        }
        s.expect("endloop");
        s.expect("endfacet");
        m.mesh.tris.push_back(idx);
    }
    return m.mesh;
}

}  // namespace

TriMesh read_stl(const std::string& bytes) {
    if (bytes.rfind("solid", 0) == 0) return read_stl_ascii(bytes);
    return read_stl_binary(bytes);
}

void write_stl_file(const std::filesystem::path& path, const TriMesh& mesh, StlFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    std::string bytes = write_stl(mesh, format);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

TriMesh read_stl_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return read_stl(bytes);
}

}  // namespace vawt
