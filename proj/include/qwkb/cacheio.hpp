// SPDX-License-Identifier: MIT
/**
 * @file cacheio.hpp
 * @brief Checksummed text cache files.
 *
 * Layout:
 *     # qwkb-cache v1
 *     # <key> <value>          (metadata, one per line)
 *     # end-header
 *     <payload line>
 *     ...
 *     # checksum <16 hex digits>   (FNV-1a 64 over payload lines)
 *
 * Readers verify the checksum and hand back metadata + payload; any
 * structural problem raises CacheError.
 */
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qwkb {

struct CacheFile {
  std::map<std::string, std::string> meta;
  std::vector<std::string> payload;
};

/// FNV-1a 64-bit over the given lines (joined with '\n').
std::uint64_t fnv1a64(const std::vector<std::string>& lines);

/// Write a cache file atomically (temp file + rename).
void write_cache(const std::string& path,
                 const std::map<std::string, std::string>& meta,
                 const std::vector<std::string>& payload);

/// Read and verify; throws CacheError on corruption or malformed structure.
CacheFile read_cache(const std::string& path);

/// True if the file exists, is well formed, and its metadata contains every
/// (key, value) pair in `expect` verbatim.
bool cache_matches(const std::string& path,
                   const std::map<std::string, std::string>& expect);

}  // namespace qwkb
