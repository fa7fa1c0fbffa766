#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "gradlab/lattice.hpp"

namespace gradlab::io {

inline constexpr std::uint32_t kSnapshotVersion = 1;

/// Field snapshots on Q_N. Little-endian: magic "GRDF", version u32, N u32,
/// count u32, then count blocks of (2N + 1)^2 float64 in box order (x slow).
struct Snapshot {
  std::uint32_t N = 0;
  std::vector<std::vector<double>> fields;
};

void write_snapshot(const std::filesystem::path& path, const std::vector<lattice::FieldConfig>& configs);
Snapshot read_snapshot(const std::filesystem::path& path);

/// Writes `content` to a temporary sibling and renames it into place.
/// Throws std::runtime_error when the directory is not writable.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

/// CSV whose first line is "# " followed by the compact provenance JSON.
std::string csv_text(const nlohmann::json& provenance, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

void write_csv(const std::filesystem::path& path, const nlohmann::json& provenance,
               const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

/// JSON document {"provenance": ..., "result": ...}.
void write_json(const std::filesystem::path& path, const nlohmann::json& provenance,
                const nlohmann::json& result);

}  // namespace gradlab::io
