#include "ovsim/snapshot.hpp"

#include <zlib.h>

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ovsim {

namespace fs = std::filesystem;

namespace {

void store_le(double v, unsigned char* out)
{
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
        out[b] = static_cast<unsigned char>(bits >> (8 * b));
    }
}

double load_le(const unsigned char* in)
{
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
        bits |= static_cast<std::uint64_t>(in[b]) << (8 * b);
    }
    return std::bit_cast<double>(bits);
}

std::string read_all(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot read '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

void write_field(const std::string& path, const std::string& name, const ScalarField& field)
{
    const int n = field.grid().size();
    std::string header = "OVSIM1 " + std::to_string(n) + " " + std::to_string(n) + " " + name;
    if (header.size() > kFieldHeaderBytes || name.empty() || name.find(' ') != std::string::npos) {
        throw Error("field name '" + name + "' does not fit the header");
    }
    header.resize(kFieldHeaderBytes, ' ');

    std::vector<unsigned char> body(field.size() * 8);
    for (std::size_t k = 0; k < field.size(); ++k) {
        store_le(field[k], body.data() + 8 * k);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
    if (!out) {
        throw Error("write failed for '" + path + "'");
    }
}

FieldFile read_field(const std::string& path)
{
    const std::string bytes = read_all(path);
    if (bytes.size() < kFieldHeaderBytes) {
        throw Error("'" + path + "' is too short for a field header");
    }
    std::istringstream header(bytes.substr(0, kFieldHeaderBytes));
    std::string magic;
    int nx = 0, ny = 0;
    FieldFile out;
    header >> magic >> nx >> ny >> out.name;
    if (magic != "OVSIM1" || nx <= 0 || nx != ny || out.name.empty()) {
        throw Error("'" + path + "' has no valid OVSIM1 header");
    }
    const auto count = static_cast<std::size_t>(nx) * ny;
    if (bytes.size() != kFieldHeaderBytes + 8 * count) {
        throw Error("'" + path + "' payload size does not match " + std::to_string(nx) + "x" + std::to_string(ny));
    }
    out.size = nx;
    out.values.resize(count);
    const auto* body = reinterpret_cast<const unsigned char*>(bytes.data()) + kFieldHeaderBytes;
    for (std::size_t k = 0; k < count; ++k) {
        out.values[k] = load_le(body + 8 * k);
    }
    return out;
}

ScalarField to_field(const FieldFile& file, const Grid& grid)
{
    if (file.size != grid.size()) {
        throw Error("field '" + file.name + "' has " + std::to_string(file.size) + " nodes per axis, grid has " +
                    std::to_string(grid.size()));
    }
    ScalarField out(grid);
    std::copy(file.values.begin(), file.values.end(), out.values().begin());
    return out;
}

std::uint32_t file_crc32(const std::string& path)
{
    const std::string bytes = read_all(path);
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
    return static_cast<std::uint32_t>(crc);
}

SnapshotManifest write_snapshot(const StateVector& state, const OrientedFibreField& fibres,
                                const TumourRegion& region, int stage, const std::string& dir)
{
    char leaf[32];
    std::snprintf(leaf, sizeof leaf, "stage_%04d", stage);
    const fs::path root = fs::path(dir) / leaf;
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) {
        throw Error("cannot create '" + root.string() + "': " + ec.message());
    }

    const Grid& g = state.grid();
    ScalarField e(g), omega(g);
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        e[k] = state.E[k] + fibres.F[k];
        omega[k] = region.contains_index(k) ? 1.0 : 0.0;
    }
    const std::pair<const char*, const ScalarField*> fields[] = {
        {"c", &state.c}, {"i", &state.i}, {"E", &state.E}, {"F", &fibres.F},
        {"e", &e},       {"v", &state.v}, {"omega", &omega}};

    SnapshotManifest manifest;
    manifest.stage = stage;
    manifest.directory = root.string();
    for (const auto& [name, field] : fields) {
        const std::string file = std::string(name) + ".ovf";
        write_field((root / file).string(), name, *field);
        manifest.entries.push_back({name, file, file_crc32((root / file).string())});
    }
    write_vector_field((root / "fibres.txt").string(), fibres);
    manifest.entries.push_back({"fibres", "fibres.txt", file_crc32((root / "fibres.txt").string())});

    nlohmann::json doc;
    doc["stage"] = stage;
    for (const auto& entry : manifest.entries) {
        doc["files"].push_back({{"name", entry.name}, {"file", entry.file}, {"crc32", entry.crc32}});
    }
    const fs::path manifest_path = root / "manifest.json";
    std::ofstream out(manifest_path);
    out << doc.dump(2) << '\n';
    if (!out) {
        throw Error("write failed for '" + manifest_path.string() + "'");
    }
    return manifest;
}

SnapshotManifest read_manifest(const std::string& manifest_path)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_all(manifest_path));
    } catch (const nlohmann::json::exception& e) {
        throw Error("'" + manifest_path + "': " + e.what());
    }
    SnapshotManifest m;
    m.stage = doc.at("stage").get<int>();
    m.directory = fs::path(manifest_path).parent_path().string();
    for (const auto& f : doc.at("files")) {
        m.entries.push_back({f.at("name").get<std::string>(), f.at("file").get<std::string>(),
                             f.at("crc32").get<std::uint32_t>()});
    }
    return m;
}

std::vector<std::string> verify_manifest(const SnapshotManifest& manifest)
{
    std::vector<std::string> bad;
    for (const auto& entry : manifest.entries) {
        const fs::path path = fs::path(manifest.directory) / entry.file;
        if (!fs::exists(path) || file_crc32(path.string()) != entry.crc32) {
            bad.push_back(entry.name);
        }
    }
    return bad;
}

}  // namespace ovsim
