#include "gradlab/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gradlab::io {

namespace {

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

template <class T>
void put(std::string& out, T v) {
  v = to_little(v);
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.append(b, sizeof(T));
}

template <class T>
T get(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw std::runtime_error("snapshot truncated");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return to_little(v);
}

}  // namespace

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

void write_snapshot(const std::filesystem::path& path, const std::vector<lattice::FieldConfig>& configs) {
  std::uint32_t N = 0;
  if (!configs.empty()) {
    const auto& d = *configs.front().domain;
    if (d.kind() != lattice::DomainKind::square) throw std::invalid_argument("snapshots hold square domains");
    N = std::uint32_t(d.half_width());
  }
  const std::size_t cells = std::size_t(2 * N + 1) * std::size_t(2 * N + 1);
  std::string out;
  out.reserve(16 + configs.size() * cells * 8);
  out.append("GRDF", 4);
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint32_t>(out, N);
  put<std::uint32_t>(out, std::uint32_t(configs.size()));
  for (const auto& c : configs) {
    if (c.values.size() != cells || std::uint32_t(c.domain->half_width()) != N)
      throw std::invalid_argument("snapshot configurations must share one square domain");
    for (double v : c.values) put<double>(out, v);
  }
  write_atomic(path, out);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();
  if (data.size() < 16 || data.compare(0, 4, "GRDF") != 0) throw std::runtime_error("not a GRDF snapshot");
  std::size_t pos = 4;
  const auto version = get<std::uint32_t>(data, pos);
  if (version != kSnapshotVersion) throw std::runtime_error("unsupported snapshot version");
  Snapshot s;
  s.N = get<std::uint32_t>(data, pos);
  const auto count = get<std::uint32_t>(data, pos);
  const std::size_t cells = std::size_t(2 * s.N + 1) * std::size_t(2 * s.N + 1);
  if (data.size() != 16 + std::size_t(count) * cells * 8) throw std::runtime_error("snapshot size mismatch");
  s.fields.resize(count);
  for (auto& f : s.fields) {
    f.resize(cells);
    for (double& v : f) v = get<double>(data, pos);
  }
  return s;
}

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string csv_text(const nlohmann::json& provenance, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  std::string out = "# " + provenance.dump() + "\n";
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_double(row[i]);
    out += "\n";
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const nlohmann::json& provenance,
               const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  write_atomic(path, csv_text(provenance, header, rows));
}

void write_json(const std::filesystem::path& path, const nlohmann::json& provenance,
                const nlohmann::json& result) {
  const nlohmann::json doc = {{"provenance", provenance}, {"result", result}};
  write_atomic(path, doc.dump(2) + "\n");
}

}  // namespace gradlab::io
