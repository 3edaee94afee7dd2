#include "oatlas/snapshot_io.h"

#include <cstring>
#include <fstream>

#include "oatlas/tsv.h"

namespace oatlas {
namespace {

constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr uint64_t kFnvPrime = 0x100000001b3ull;

class Writer {
 public:
  explicit Writer(std::ostream &out) : out_(out) {}

  void Bytes(const void *data, size_t n) {
    const auto *p = static_cast<const unsigned char *>(data);
    for (size_t i = 0; i < n; ++i) hash_ = (hash_ ^ p[i]) * kFnvPrime;
    out_.write(static_cast<const char *>(data), static_cast<std::streamsize>(n));
  }

  void Fixed(uint64_t v, int bytes) {
    unsigned char buf[8];
    for (int i = 0; i < bytes; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    Bytes(buf, bytes);
  }

  void Varint(uint64_t v) {
    unsigned char buf[10];
    int n = 0;
    while (v >= 0x80) {
      buf[n++] = static_cast<unsigned char>(v | 0x80);
      v >>= 7;
    }
    buf[n++] = static_cast<unsigned char>(v);
    Bytes(buf, n);
  }

  uint64_t hash() const { return hash_; }

 private:
  std::ostream &out_;
  uint64_t hash_ = kFnvOffset;
};

class Reader {
 public:
  explicit Reader(std::istream &in) : in_(in) {}

  void Bytes(void *data, size_t n) {
    in_.read(static_cast<char *>(data), static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in_.gcount()) != n) {
      throw DataError("snapshot container is truncated");
    }
    const auto *p = static_cast<const unsigned char *>(data);
    for (size_t i = 0; i < n; ++i) hash_ = (hash_ ^ p[i]) * kFnvPrime;
  }

  uint64_t Fixed(int bytes) {
    unsigned char buf[8];
    Bytes(buf, bytes);
    uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<uint64_t>(buf[i]) << (8 * i);
    return v;
  }

  uint64_t Varint() {
    uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      unsigned char b;
      Bytes(&b, 1);
      v |= static_cast<uint64_t>(b & 0x7f) << shift;
      if ((b & 0x80) == 0) return v;
    }
    throw DataError("snapshot container has an overlong varint");
  }

  uint64_t hash() const { return hash_; }

 private:
  std::istream &in_;
  uint64_t hash_ = kFnvOffset;
};

}  // namespace

void WriteSnapshot(std::ostream &out, const LinkSnapshot &snapshot) {
  Writer w(out);
  w.Bytes(kSnapshotMagic, 4);
  w.Fixed(kSnapshotFormatVersion, 4);
  w.Varint(snapshot.language().size());
  w.Bytes(snapshot.language().data(), snapshot.language().size());
  w.Varint(static_cast<uint64_t>(snapshot.month().year()));
  w.Varint(static_cast<uint64_t>(snapshot.month().month()));

  auto articles = snapshot.articles();
  w.Varint(articles.size());
  PageId prev = 0;
  for (size_t i = 0; i < articles.size(); ++i) {
    w.Varint(i == 0 ? articles[i] : articles[i] - prev);
    prev = articles[i];
  }
  w.Varint(snapshot.num_edges());
  for (uint32_t i = 0; i < articles.size(); ++i) {
    auto links = snapshot.OutLinks(i);
    w.Varint(links.size());
    for (size_t k = 0; k < links.size(); ++k) {
      w.Varint(k == 0 ? links[k] : links[k] - links[k - 1]);
    }
  }
  w.Fixed(w.hash(), 8);
  if (!out) throw DataError("failed writing snapshot container");
}

LinkSnapshot ReadSnapshot(std::istream &in) {
  Reader r(in);
  char magic[4];
  r.Bytes(magic, 4);
  if (std::memcmp(magic, kSnapshotMagic, 4) != 0) {
    throw DataError("not a snapshot container (bad magic)");
  }
  uint64_t version = r.Fixed(4);
  if (version != kSnapshotFormatVersion) {
    throw DataError("unsupported snapshot format version " +
                    std::to_string(version));
  }
  uint64_t language_size = r.Varint();
  if (language_size > 256) throw DataError("snapshot language code too long");
  std::string language(language_size, '\0');
  r.Bytes(language.data(), language_size);
  uint64_t year = r.Varint();
  uint64_t month = r.Varint();
  if (month < 1 || month > 12 || year > 9999) {
    throw DataError("snapshot has an invalid month");
  }

  uint64_t n = r.Varint();
  if (n > (uint64_t{1} << 32)) throw DataError("snapshot article count too large");
  std::vector<PageId> articles;
  articles.reserve(n);
  for (uint64_t i = 0; i < n; ++i) {
    uint64_t v = r.Varint();
    if (i > 0 && v == 0) throw DataError("snapshot article ids not ascending");
    articles.push_back(i == 0 ? v : articles.back() + v);
  }
  uint64_t m = r.Varint();
  std::vector<uint64_t> offsets;
  offsets.reserve(n + 1);
  offsets.push_back(0);
  std::vector<uint32_t> targets;
  targets.reserve(m);
  for (uint64_t i = 0; i < n; ++i) {
    uint64_t degree = r.Varint();
    if (targets.size() + degree > m) {
      throw DataError("snapshot adjacency exceeds its edge count");
    }
    for (uint64_t k = 0; k < degree; ++k) {
      uint64_t v = r.Varint();
      if (k > 0 && v == 0) throw DataError("snapshot out-links not ascending");
      uint64_t t = k == 0 ? v : targets.back() + v;
      if (t >= n) throw DataError("snapshot edge endpoint out of range");
      targets.push_back(static_cast<uint32_t>(t));
    }
    offsets.push_back(targets.size());
  }
  if (targets.size() != m) throw DataError("snapshot edge count mismatch");
  uint64_t expected = r.hash();
  if (r.Fixed(8) != expected) throw DataError("snapshot checksum mismatch");

  return LinkSnapshot::FromAdjacency(
      std::move(language),
      Month(static_cast<int>(year), static_cast<int>(month)),
      std::move(articles), std::move(offsets), std::move(targets));
}

void SaveSnapshot(const std::filesystem::path &path,
                  const LinkSnapshot &snapshot) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  WriteSnapshot(out, snapshot);
}

LinkSnapshot LoadSnapshot(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return ReadSnapshot(in);
}

void WriteEdgeListTsv(std::ostream &out, const LinkSnapshot &snapshot) {
  out << "from_page_id\tto_page_id\n";
  snapshot.ForEachEdge(
      [&](const Edge &e) { out << e.from << '\t' << e.to << '\n'; });
}

LinkSnapshot ReadEdgeListTsv(std::istream &in, std::string language,
                             Month month,
                             std::span<const PageId> extra_articles) {
  std::vector<PageId> articles(extra_articles.begin(), extra_articles.end());
  std::vector<Edge> edges;
  TsvReader reader(in);
  std::vector<std::string_view> f;
  while (reader.Next(f)) {
    if (f[0] == "from_page_id") continue;
    std::optional<uint64_t> from = ParseUnsigned(f[0]);
    std::optional<uint64_t> to = f.size() == 2 ? ParseUnsigned(f[1]) : std::nullopt;
    if (!from || !to) {
      throw DataError("edge list line " + std::to_string(reader.line_number()) +
                      " is malformed");
    }
    edges.push_back(Edge{*from, *to});
    articles.push_back(*from);
    articles.push_back(*to);
  }
  return LinkSnapshot::FromEdges(std::move(language), month,
                                 std::move(articles), edges);
}

}  // namespace oatlas
