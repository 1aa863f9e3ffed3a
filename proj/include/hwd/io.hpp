#pragma once

// File formats: headerless dataset CSVs, JSON manifests, labeled distance matrices.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hwd/distance_matrix.hpp"
#include "hwd/transport.hpp"

namespace hwd {

/// Shortest text that reads back to the same double ("%.17g" precision).
std::string format_double(double x);

/// Quotes a CSV field when it contains a comma, quote or line break.
std::string csv_field(const std::string& s);

/// One observation per line, comma-separated coordinates, no header.
Dataset read_dataset_csv(const std::filesystem::path& path, const std::string& id = {});
void write_dataset_csv(std::ostream& out, const Matrix& points);

struct ManifestEntry {
  std::string id;
  std::filesystem::path path;  // resolved against the manifest's directory
  std::optional<std::size_t> true_label;
};

/// JSON: {"datasets": [{"id": ..., "path": ..., "true_label": ...}, ...]}.
/// A bare top-level array of entries is accepted too.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(std::ostream& out, std::span<const ManifestEntry> entries);

std::vector<Dataset> load_datasets(std::span<const ManifestEntry> entries);

/// Labels if every entry has one, otherwise empty.
std::vector<std::size_t> manifest_labels(std::span<const ManifestEntry> entries);

/// Header row "id,<id_1>,...", then one row per dataset starting with its id.
void write_distance_csv(std::ostream& out, std::span<const std::string> ids, const DistanceMatrix& distances);

struct LabeledDistances {
  std::vector<std::string> ids;
  DistanceMatrix distances;
};
LabeledDistances read_distance_csv(const std::filesystem::path& path);

/// Writes through a sibling temporary file renamed into place on success.
/// On failure the temporary is removed and the error propagates.
void write_file_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body);

}  // namespace hwd
