#ifndef OATLAS_CATALOG_H_
#define OATLAS_CATALOG_H_

#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "oatlas/ingest.h"

namespace oatlas {

struct CatalogEntry {
  PageId page_id = 0;
  std::string title;
  std::optional<Qid> qid;
};

// Titles and Wikidata items of the articles of one language snapshot.
class ArticleCatalog {
 public:
  ArticleCatalog() = default;
  ArticleCatalog(std::string language, std::vector<CatalogEntry> entries);

  // Non-redirect main-namespace pages of `pages`, with their items looked up
  // by (language, title).
  static ArticleCatalog Build(std::string language, const PageTable &pages,
                              const QidIndex &qids);

  const std::string &language() const { return language_; }
  std::span<const CatalogEntry> entries() const { return entries_; }

  const CatalogEntry *Find(PageId page) const;
  std::optional<Qid> QidOf(PageId page) const;
  std::optional<PageId> PageOf(Qid qid) const;
  std::string_view TitleOf(PageId page) const;

 private:
  std::string language_;
  std::vector<CatalogEntry> entries_;  // ascending page id
  std::unordered_map<Qid, PageId, QidHash> by_qid_;
};

// page_id, title, qid (empty when unknown).
void WriteCatalogTsv(std::ostream &out, const ArticleCatalog &catalog);
ArticleCatalog ReadCatalogTsv(std::istream &in, std::string language);

}  // namespace oatlas

#endif  // OATLAS_CATALOG_H_
