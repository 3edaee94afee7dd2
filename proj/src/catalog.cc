#include "oatlas/catalog.h"

#include <algorithm>

#include "oatlas/tsv.h"

namespace oatlas {

ArticleCatalog::ArticleCatalog(std::string language,
                               std::vector<CatalogEntry> entries)
    : language_(std::move(language)), entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const CatalogEntry &a, const CatalogEntry &b) {
              return a.page_id < b.page_id;
            });
  for (const CatalogEntry &e : entries_) {
    if (e.qid) by_qid_.emplace(*e.qid, e.page_id);
  }
}

ArticleCatalog ArticleCatalog::Build(std::string language,
                                     const PageTable &pages,
                                     const QidIndex &qids) {
  std::vector<CatalogEntry> entries;
  entries.reserve(pages.size());
  for (const auto &[id, record] : pages.records()) {
    if (record.is_redirect) continue;
    entries.push_back(
        CatalogEntry{id, record.title, qids.Find(language, record.title)});
  }
  return ArticleCatalog(std::move(language), std::move(entries));
}

const CatalogEntry *ArticleCatalog::Find(PageId page) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), page,
      [](const CatalogEntry &e, PageId p) { return e.page_id < p; });
  if (it == entries_.end() || it->page_id != page) return nullptr;
  return &*it;
}

std::optional<Qid> ArticleCatalog::QidOf(PageId page) const {
  const CatalogEntry *e = Find(page);
  return e == nullptr ? std::nullopt : e->qid;
}

std::optional<PageId> ArticleCatalog::PageOf(Qid qid) const {
  auto it = by_qid_.find(qid);
  if (it == by_qid_.end()) return std::nullopt;
  return it->second;
}

std::string_view ArticleCatalog::TitleOf(PageId page) const {
  const CatalogEntry *e = Find(page);
  return e == nullptr ? std::string_view() : std::string_view(e->title);
}

void WriteCatalogTsv(std::ostream &out, const ArticleCatalog &catalog) {
  out << "page_id\ttitle\tqid\n";
  for (const CatalogEntry &e : catalog.entries()) {
    out << e.page_id << '\t' << TsvEscape(e.title) << '\t'
        << (e.qid ? e.qid->ToString() : std::string()) << '\n';
  }
}

ArticleCatalog ReadCatalogTsv(std::istream &in, std::string language) {
  std::vector<CatalogEntry> entries;
  TsvReader reader(in);
  std::vector<std::string_view> f;
  while (reader.Next(f)) {
    if (f[0] == "page_id") continue;
    std::optional<uint64_t> id = f.size() == 3 ? ParseUnsigned(f[0]) : std::nullopt;
    if (!id) {
      throw DataError("article catalog line " +
                      std::to_string(reader.line_number()) + " is malformed");
    }
    CatalogEntry e{*id, TsvUnescape(f[1]), std::nullopt};
    if (!f[2].empty()) {
      e.qid = Qid::Parse(f[2]);
      if (!e.qid) throw DataError("bad qid in article catalog");
    }
    entries.push_back(std::move(e));
  }
  return ArticleCatalog(std::move(language), std::move(entries));
}

}  // namespace oatlas
