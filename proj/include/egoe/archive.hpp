#pragma once

// Spectrum archive: 8-byte magic "EGOEARC1", little-endian uint32 header length,
// the header as UTF-8 JSON, then one record per member:
//   uint64 member index, uint64 member seed, d float64 eigenvalues (ascending).
// All integers and floats are little-endian.

#include <bit>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "egoe/ensemble.hpp"
#include "egoe/errors.hpp"
#include "egoe/spectra.hpp"

namespace egoe {

inline constexpr std::string_view kArchiveMagic = "EGOEARC1";
inline constexpr int kArchiveFormatVersion = 1;

inline nlohmann::json to_json(const EnsembleSpec& s) {
  return nlohmann::json{{"statistics", std::string(to_string(s.statistics))},
                        {"m", s.m},
                        {"N", s.N},
                        {"k", s.k},
                        {"members", s.members},
                        {"master_seed", s.master_seed},
                        {"nu2", s.nu2}};
}

inline EnsembleSpec ensemble_spec_from_json(const nlohmann::json& j) {
  EnsembleSpec s;
  try {
    if (j.contains("statistics")) s.statistics = parse_statistics(j.at("statistics").get<std::string>());
    if (j.contains("m")) s.m = j.at("m").get<int>();
    if (j.contains("N")) s.N = j.at("N").get<int>();
    if (j.contains("k")) s.k = j.at("k").get<int>();
    if (j.contains("members")) s.members = j.at("members").get<int>();
    if (j.contains("master_seed")) s.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("nu2")) s.nu2 = j.at("nu2").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("ensemble spec: ") + e.what());
  }
  s.validate();
  return s;
}

/// Creation time recorded in archive headers. Taken from SOURCE_DATE_EPOCH when
/// set, otherwise the Unix epoch, so that archives are reproducible byte for byte.
inline std::string archive_timestamp() {
  std::time_t t = 0;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env && *env) {
    t = static_cast<std::time_t>(std::strtoll(env, nullptr, 10));
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct ArchiveHeader {
  int format_version = kArchiveFormatVersion;
  EnsembleSpec spec;
  std::uint64_t dimension = 0;
  std::string created = "1970-01-01T00:00:00Z";
};

struct ArchiveRecord {
  std::uint64_t member = 0;
  std::uint64_t seed = 0;
  std::vector<double> eigenvalues;

  bool operator==(const ArchiveRecord&) const = default;
};

struct SpectrumArchive {
  ArchiveHeader header;
  std::vector<ArchiveRecord> records;

  void validate() const {
    if (records.size() != static_cast<std::size_t>(header.spec.members)) {
      throw DomainError("archive: " + std::to_string(records.size()) + " records but header says " +
                        std::to_string(header.spec.members) + " members");
    }
    for (const auto& r : records) {
      if (r.eigenvalues.size() != header.dimension) {
        throw DomainError("archive: record " + std::to_string(r.member) + " has " +
                          std::to_string(r.eigenvalues.size()) + " eigenvalues, expected " +
                          std::to_string(header.dimension));
      }
    }
  }

  std::vector<Spectrum> spectra() const {
    std::vector<Spectrum> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(Spectrum{r.eigenvalues, static_cast<int>(r.member), r.seed});
    return out;
  }
};

inline SpectrumArchive make_archive(const EnsembleSpec& spec, const std::vector<Spectrum>& spectra) {
  SpectrumArchive a;
  a.header.spec = spec;
  a.header.dimension = spec.m_dimension();
  a.header.created = archive_timestamp();
  for (const auto& s : spectra) {
    a.records.push_back(ArchiveRecord{static_cast<std::uint64_t>(s.member), s.seed, s.levels});
  }
  a.validate();
  return a;
}

inline nlohmann::json header_json(const ArchiveHeader& h) {
  nlohmann::json j = to_json(h.spec);
  j["format"] = std::string(kArchiveMagic);
  j["format_version"] = h.format_version;
  j["dimension"] = h.dimension;
  j["created"] = h.created;
  return j;
}

namespace detail {

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFFU));
}

inline std::uint64_t get_u64(std::string_view in, std::size_t& pos) {
  if (pos + 8 > in.size()) throw IoError("archive: truncated data");
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + b])) << (8 * b);
  pos += 8;
  return v;
}

}  // namespace detail

inline std::string encode_archive(const SpectrumArchive& a) {
  a.validate();
  const std::string header = header_json(a.header).dump();
  std::string out(kArchiveMagic);
  const auto len = static_cast<std::uint32_t>(header.size());
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((len >> (8 * b)) & 0xFFU));
  out += header;
  out.reserve(out.size() + a.records.size() * (16 + 8 * a.header.dimension));
  for (const auto& r : a.records) {
    detail::put_u64(out, r.member);
    detail::put_u64(out, r.seed);
    for (double e : r.eigenvalues) detail::put_u64(out, std::bit_cast<std::uint64_t>(e));
  }
  return out;
}

inline SpectrumArchive decode_archive(std::string_view bytes) {
  if (bytes.size() < 12 || bytes.substr(0, 8) != kArchiveMagic) {
    throw IoError("archive: bad magic (expected EGOEARC1)");
  }
  std::uint32_t len = 0;
  for (int b = 0; b < 4; ++b) len |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[8 + b])) << (8 * b);
  if (12 + static_cast<std::size_t>(len) > bytes.size()) throw IoError("archive: truncated header");
  SpectrumArchive a;
  try {
    const auto j = nlohmann::json::parse(bytes.substr(12, len));
    a.header.format_version = j.at("format_version").get<int>();
    if (a.header.format_version != kArchiveFormatVersion) {
      throw IoError("archive: unsupported format version " + std::to_string(a.header.format_version));
    }
    a.header.spec = ensemble_spec_from_json(j);
    a.header.dimension = j.at("dimension").get<std::uint64_t>();
    a.header.created = j.at("created").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("archive: bad header: ") + e.what());
  }
  std::size_t pos = 12 + len;
  for (int i = 0; i < a.header.spec.members; ++i) {
    ArchiveRecord r;
    r.member = detail::get_u64(bytes, pos);
    r.seed = detail::get_u64(bytes, pos);
    r.eigenvalues.resize(a.header.dimension);
    for (auto& e : r.eigenvalues) e = std::bit_cast<double>(detail::get_u64(bytes, pos));
    a.records.push_back(std::move(r));
  }
  if (pos != bytes.size()) throw IoError("archive: trailing bytes after last record");
  a.validate();
  return a;
}

inline void write_archive_file(const std::filesystem::path& path, const SpectrumArchive& a) {
  const std::string bytes = encode_archive(a);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline SpectrumArchive read_archive_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_archive(bytes);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

/// Human-readable dump of a whole archive.
inline nlohmann::json archive_to_json(const SpectrumArchive& a) {
  nlohmann::json j;
  j["header"] = header_json(a.header);
  j["records"] = nlohmann::json::array();
  for (const auto& r : a.records) {
    j["records"].push_back({{"member", r.member}, {"seed", r.seed}, {"eigenvalues", r.eigenvalues}});
  }
  return j;
}

}  // namespace egoe
