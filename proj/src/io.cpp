#include "hwd/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hwd/error.hpp"

namespace hwd {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(std::move(field));
  return out;
}

double parse_double(std::string_view text, const std::string& where) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorKind::IoError, "not a number '" + std::string(text) + "' in " + where);
  }
  return value;
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Dataset read_dataset_csv(const fs::path& path, const std::string& id) {
  auto in = open_input(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    std::vector<double> row;
    row.reserve(fields.size());
    const std::string where = path.string() + ":" + std::to_string(line_no);
    for (const auto& f : fields) row.push_back(parse_double(f, where));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorKind::IoError, "ragged row at " + where);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::IoError, "no observations in '" + path.string() + "'");
  Matrix pts(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) pts(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  return Dataset(std::move(pts), id.empty() ? path.stem().string() : id);
}

void write_dataset_csv(std::ostream& out, const Matrix& points) {
  for (Index i = 0; i < points.rows(); ++i) {
    for (Index j = 0; j < points.cols(); ++j) out << (j ? "," : "") << format_double(points(i, j));
    out << '\n';
  }
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  auto in = open_input(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::IoError, "malformed manifest '" + path.string() + "': " + e.what());
  }
  const nlohmann::json& list = doc.is_array() ? doc : doc.value("datasets", nlohmann::json());
  if (!list.is_array() || list.empty()) throw Error(ErrorKind::IoError, "manifest lists no datasets");
  std::vector<ManifestEntry> out;
  const fs::path base = path.parent_path();
  for (const auto& item : list) {
    if (!item.is_object() || !item.contains("path") || !item["path"].is_string()) {
      throw Error(ErrorKind::IoError, "manifest entry without a path");
    }
    ManifestEntry e;
    e.path = item["path"].get<std::string>();
    if (e.path.is_relative()) e.path = base / e.path;
    e.id = item.contains("id") && item["id"].is_string() ? item["id"].get<std::string>() : e.path.stem().string();
    if (item.contains("true_label") && !item["true_label"].is_null()) {
      if (!item["true_label"].is_number_integer() || item["true_label"].get<long long>() < 0) {
        throw Error(ErrorKind::IoError, "true_label must be a nonnegative integer");
      }
      e.true_label = item["true_label"].get<std::size_t>();
    }
    out.push_back(std::move(e));
  }
  return out;
}

void write_manifest(std::ostream& out, std::span<const ManifestEntry> entries) {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json item;
    item["id"] = e.id;
    item["path"] = e.path.generic_string();
    if (e.true_label) item["true_label"] = *e.true_label;
    list.push_back(std::move(item));
  }
  nlohmann::ordered_json doc;
  doc["datasets"] = std::move(list);
  out << doc.dump(2) << '\n';
}

std::vector<Dataset> load_datasets(std::span<const ManifestEntry> entries) {
  std::vector<Dataset> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(read_dataset_csv(e.path, e.id));
  for (const auto& d : out) {
    if (d.dim() != out.front().dim()) throw Error(ErrorKind::DimensionError, "datasets differ in dimension");
  }
  return out;
}

std::vector<std::size_t> manifest_labels(std::span<const ManifestEntry> entries) {
  std::vector<std::size_t> out;
  for (const auto& e : entries) {
    if (!e.true_label) return {};
    out.push_back(*e.true_label);
  }
  return out;
}

void write_distance_csv(std::ostream& out, std::span<const std::string> ids, const DistanceMatrix& distances) {
  if (ids.size() != static_cast<std::size_t>(distances.size())) throw Error(ErrorKind::SizeError, "one id per row");
  out << "id";
  for (const auto& id : ids) out << ',' << csv_field(id);
  out << '\n';
  for (Index i = 0; i < distances.size(); ++i) {
    out << csv_field(ids[static_cast<std::size_t>(i)]);
    for (Index j = 0; j < distances.size(); ++j) out << ',' << format_double(distances(i, j));
    out << '\n';
  }
}

LabeledDistances read_distance_csv(const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::IoError, "empty distance file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv_line(line);
  if (header.size() < 2) throw Error(ErrorKind::IoError, "distance header has no ids");
  LabeledDistances out;
  out.ids.assign(header.begin() + 1, header.end());
  const auto n = static_cast<Index>(out.ids.size());
  Matrix d(n, n);
  Index row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (row >= n || static_cast<Index>(fields.size()) != n + 1) {
      throw Error(ErrorKind::IoError, "distance matrix is not square");
    }
    if (fields[0] != out.ids[static_cast<std::size_t>(row)]) throw Error(ErrorKind::IoError, "row ids differ from header");
    for (Index j = 0; j < n; ++j) {
      d(row, j) = parse_double(fields[static_cast<std::size_t>(j + 1)], path.string());
    }
    ++row;
  }
  if (row != n) throw Error(ErrorKind::IoError, "distance matrix is not square");
  try {
    out.distances = DistanceMatrix(std::move(d));
  } catch (const Error& e) {
    throw Error(ErrorKind::IoError, std::string("invalid distance matrix: ") + e.what());
  }
  return out;
}

void write_file_atomic(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  fs::path tmp = path;
  tmp += ".tmp";
  try {
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path.string() + "'");
      body(out);
      out.flush();
      if (!out) throw Error(ErrorKind::IoError, "write failed for '" + path.string() + "'");
    }
    fs::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

}  // namespace hwd
