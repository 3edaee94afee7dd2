#ifndef OATLAS_SNAPSHOT_IO_H_
#define OATLAS_SNAPSHOT_IO_H_

#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>

#include "oatlas/graph.h"

namespace oatlas {

// Binary snapshot container, version 1. All integers are unsigned LEB128
// varints unless noted.
//
//   "OATL"                      4 bytes
//   format version              u32 little-endian (currently 1)
//   language                    varint length, UTF-8 bytes
//   month                       varint year, varint month (1..12)
//   article count n             varint
//   article page ids            first id, then n-1 positive gaps
//   edge count m                varint
//   per article, in order:      out-degree d, then d target indices as first
//                               index, then d-1 positive gaps
//   checksum                    u64 little-endian FNV-1a of all prior bytes
//
// Target indices refer to positions in the (ascending) article table.
constexpr char kSnapshotMagic[4] = {'O', 'A', 'T', 'L'};
constexpr uint32_t kSnapshotFormatVersion = 1;

void WriteSnapshot(std::ostream &out, const LinkSnapshot &snapshot);
// Throws DataError on a bad magic, unknown version, truncation or checksum
// mismatch.
LinkSnapshot ReadSnapshot(std::istream &in);

void SaveSnapshot(const std::filesystem::path &path,
                  const LinkSnapshot &snapshot);
LinkSnapshot LoadSnapshot(const std::filesystem::path &path);

// Plain edge list: a "from_page_id\tto_page_id" header, then one edge per
// line in (from, to) order. Isolated articles are not represented.
void WriteEdgeListTsv(std::ostream &out, const LinkSnapshot &snapshot);
// Articles are the edge endpoints plus `extra_articles`.
LinkSnapshot ReadEdgeListTsv(std::istream &in, std::string language,
                             Month month,
                             std::span<const PageId> extra_articles = {});

}  // namespace oatlas

#endif  // OATLAS_SNAPSHOT_IO_H_
