#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ovsim/fibre.hpp"
#include "ovsim/grid.hpp"

namespace ovsim {

/// Field file layout: a 32-byte ASCII header "OVSIM1 <N> <N> <name>" padded
/// with spaces, then N*N little-endian IEEE-754 doubles, row-major (x2 outer).
inline constexpr std::size_t kFieldHeaderBytes = 32;

struct FieldFile {
    std::string name;
    int size = 0;
    std::vector<double> values;
};

void write_field(const std::string& path, const std::string& name, const ScalarField& field);
FieldFile read_field(const std::string& path);
/// Wraps file values on a grid; throws if the node counts differ.
ScalarField to_field(const FieldFile& file, const Grid& grid);

std::uint32_t file_crc32(const std::string& path);

struct ManifestEntry {
    std::string name;
    std::string file;    ///< relative to the manifest's directory
    std::uint32_t crc32 = 0;
};

struct SnapshotManifest {
    int stage = 0;
    std::string directory;
    std::vector<ManifestEntry> entries;
};

/// Writes c, i, E, F, e, v, the tumour mask (omega) and the fibre vector field
/// into `<dir>/stage_XXXX/` plus a manifest.json with CRC-32 checksums.
SnapshotManifest write_snapshot(const StateVector& state, const OrientedFibreField& fibres,
                                const TumourRegion& region, int stage, const std::string& dir);

SnapshotManifest read_manifest(const std::string& manifest_path);

/// Names of entries whose file is missing or whose checksum differs; empty when intact.
std::vector<std::string> verify_manifest(const SnapshotManifest& manifest);

}  // namespace ovsim
