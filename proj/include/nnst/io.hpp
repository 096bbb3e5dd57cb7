#pragma once

// Configuration files, diagnostics CSV and the binary density snapshot.
//
// Snapshot layout (all little-endian):
//   "NNST" | u16 version | u16 d | u32 n | f64 time | n^d f64 row-major | u32 CRC32(payload)

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nnst/simulator.hpp"

namespace nnst {

inline constexpr std::uint16_t kSnapshotVersion = 1;

/// Parses `[section]` / `key = value` text ('#' starts a comment). Every
/// offending line is listed in the thrown Error; the kind is that of the
/// first problem found. Inadmissible exponents are rejected unless `force`.
SimulationConfig parse_config(std::string_view text, bool force = false);
SimulationConfig load_config(const std::filesystem::path& path, bool force = false);

/// Config keys accepted by parse_config.
std::span<const std::string_view> config_keys();

std::string write_diagnostics(const DiagnosticsSeries& series);
DiagnosticsSeries parse_diagnostics(std::string_view csv);

std::vector<std::uint8_t> encode_snapshot(const Snapshot& snap);
/// Throws CorruptSnapshot on a bad magic, version, length or checksum.
Snapshot decode_snapshot(std::span<const std::uint8_t> bytes);

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap);
Snapshot read_snapshot(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace nnst
