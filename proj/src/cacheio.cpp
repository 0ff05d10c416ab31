// SPDX-License-Identifier: MIT
#include "qwkb/cacheio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qwkb/errors.hpp"

namespace qwkb {

namespace {
constexpr const char* kMagic = "# qwkb-cache v1";
constexpr const char* kEndHeader = "# end-header";
constexpr const char* kChecksumPrefix = "# checksum ";
}  // namespace

std::uint64_t fnv1a64(const std::vector<std::string>& lines) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 1099511628211ULL;
  };
  for (const auto& line : lines) {
    for (unsigned char c : line) mix(c);
    mix('\n');
  }
  return h;
}

void write_cache(const std::string& path,
                 const std::map<std::string, std::string>& meta,
                 const std::vector<std::string>& payload) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp);
    if (!os) throw CacheError("cannot open for writing: " + path);
    os << kMagic << "\n";
    for (const auto& [k, v] : meta) os << "# " << k << " " << v << "\n";
    os << kEndHeader << "\n";
    for (const auto& line : payload) os << line << "\n";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(payload)));
    os << kChecksumPrefix << buf << "\n";
    if (!os) throw CacheError("write failed: " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw CacheError("rename failed: " + path);
  }
}

CacheFile read_cache(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw CacheError("cannot open cache file: " + path);
  std::string line;
  if (!std::getline(is, line) || line != kMagic) {
    throw CacheError("bad cache magic in " + path);
  }
  CacheFile out;
  bool header_done = false;
  while (std::getline(is, line)) {
    if (!header_done) {
      if (line == kEndHeader) {
        header_done = true;
        continue;
      }
      if (line.size() < 2 || line[0] != '#' || line[1] != ' ') {
        throw CacheError("malformed header line in " + path + ": " + line);
      }
      std::istringstream ls(line.substr(2));
      std::string key;
      ls >> key;
      std::string value;
      std::getline(ls, value);
      if (!value.empty() && value[0] == ' ') value.erase(0, 1);
      if (key.empty()) throw CacheError("empty header key in " + path);
      out.meta[key] = value;
      continue;
    }
    if (line.rfind(kChecksumPrefix, 0) == 0) {
      const std::string hex = line.substr(std::string(kChecksumPrefix).size());
      std::uint64_t stored = 0;
      try {
        stored = std::stoull(hex, nullptr, 16);
      } catch (const std::exception&) {
        throw CacheError("malformed checksum in " + path);
      }
      if (stored != fnv1a64(out.payload)) {
        throw CacheError("checksum mismatch in " + path);
      }
      return out;
    }
    out.payload.push_back(line);
  }
  throw CacheError("missing checksum line in " + path);
}

bool cache_matches(const std::string& path,
                   const std::map<std::string, std::string>& expect) {
  CacheFile cf;
  try {
    cf = read_cache(path);
  } catch (const CacheError&) {
    return false;
  }
  for (const auto& [k, v] : expect) {
    auto it = cf.meta.find(k);
    if (it == cf.meta.end() || it->second != v) return false;
  }
  return true;
}

}  // namespace qwkb
