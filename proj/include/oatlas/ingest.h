#ifndef OATLAS_INGEST_H_
#define OATLAS_INGEST_H_

#include <array>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "oatlas/errors.h"
#include "oatlas/month.h"
#include "oatlas/sql_dump.h"

namespace oatlas {

using PageId = uint64_t;

// Namespace of encyclopedia articles.
constexpr int kMainNamespace = 0;

// Collects row-level problems. In strict mode the first report throws
// DataError; otherwise problems are counted and a few are kept as samples.
class RowIssues {
 public:
  static constexpr size_t kMaxSamples = 20;

  explicit RowIssues(ParseMode mode) : mode_(mode) {}

  void Report(const std::string &message);

  ParseMode mode() const { return mode_; }
  uint64_t count() const { return count_; }
  const std::vector<std::string> &samples() const { return samples_; }

 private:
  ParseMode mode_;
  uint64_t count_ = 0;
  std::vector<std::string> samples_;
};

// ---------------------------------------------------------------------------
// page table

struct PageRecord {
  PageId page_id = 0;
  int namespace_id = 0;
  // Dump form: underscores for spaces, case as given.
  std::string title;
  bool is_redirect = false;
};

struct PageTableStats {
  uint64_t rows = 0;
  uint64_t non_main = 0;
  uint64_t duplicates = 0;
  uint64_t bad_rows = 0;
};

// Main-namespace pages of one snapshot, indexed by id and by title.
class PageTable {
 public:
  const PageRecord *Find(PageId id) const;
  std::optional<PageId> FindTitle(std::string_view title) const;

  size_t size() const { return by_id_.size(); }
  const std::unordered_map<PageId, PageRecord> &records() const {
    return by_id_;
  }
  const PageTableStats &stats() const { return stats_; }

 private:
  friend class PageTableBuilder;

  std::unordered_map<PageId, PageRecord> by_id_;
  std::unordered_map<std::string, PageId> by_title_;
  PageTableStats stats_;
};

// Accepts rows in the page-table layout (page_id, page_namespace, page_title,
// page_is_redirect, ...). Rows outside the main namespace are dropped.
// Duplicate ids or titles abort in strict mode; in lenient mode the last row
// wins.
class PageTableBuilder {
 public:
  explicit PageTableBuilder(ParseMode mode = ParseMode::kLenient)
      : issues_(mode) {}

  void Add(const SqlRow &row);
  void Add(PageRecord record);
  PageTable Finish();

  const RowIssues &issues() const { return issues_; }

 private:
  void Insert(PageRecord record);

  PageTable table_;
  RowIssues issues_;
};

PageTable LoadPageTable(std::span<const SqlRow> rows,
                        ParseMode mode = ParseMode::kLenient);
PageTable LoadPageTable(SqlRowReader &reader,
                        ParseMode mode = ParseMode::kLenient);

// ---------------------------------------------------------------------------
// redirect table

struct RedirectRecord {
  PageId from_page_id = 0;
  int target_namespace = 0;
  std::string target_title;
};

struct RedirectStats {
  uint64_t rows = 0;
  uint64_t dropped_missing_target = 0;
  uint64_t dropped_non_main_target = 0;
  uint64_t dropped_unknown_source = 0;
  uint64_t bad_rows = 0;
};

// Single-hop redirect targets: redirect page id -> page id of the title it
// points to. Chains are resolved when the graph is built.
struct RedirectMap {
  std::unordered_map<PageId, PageId> targets;
  RedirectStats stats;
};

// Rows follow (rd_from, rd_namespace, rd_title, ...). Targets that are not
// main-namespace pages of `pages` are dropped and counted, as are sources that
// are not redirect pages of `pages`.
RedirectMap LoadRedirects(std::span<const SqlRow> rows, const PageTable &pages,
                          ParseMode mode = ParseMode::kLenient);
RedirectMap LoadRedirects(SqlRowReader &reader, const PageTable &pages,
                          ParseMode mode = ParseMode::kLenient);
RedirectMap ResolveRedirectRecords(std::span<const RedirectRecord> records,
                                   const PageTable &pages);

// ---------------------------------------------------------------------------
// pagelinks

struct RawLink {
  PageId from_page_id = 0;
  int target_namespace = 0;
  std::string target_title;
};

// Decodes a pagelinks row (pl_from, pl_namespace, pl_title, pl_from_namespace).
// Returns false if the row does not have that shape.
bool DecodePagelinkRow(const SqlRow &row, RawLink &link);

// ---------------------------------------------------------------------------
// sitelinks

// Wikidata item id, Q followed by digits.
class Qid {
 public:
  constexpr Qid() = default;
  constexpr explicit Qid(uint64_t value) : value_(value) {}

  static std::optional<Qid> Parse(std::string_view text);

  uint64_t value() const { return value_; }
  std::string ToString() const { return "Q" + std::to_string(value_); }

  friend auto operator<=>(const Qid &, const Qid &) = default;

 private:
  uint64_t value_ = 0;
};

struct QidHash {
  size_t operator()(Qid q) const { return std::hash<uint64_t>()(q.value()); }
};

struct SitelinkRecord {
  Qid qid;
  std::string language;
  std::string title;
};

struct QidIndexStats {
  uint64_t rows = 0;
  uint64_t exact_duplicates = 0;
  uint64_t conflicts = 0;
  uint64_t bad_rows = 0;
};

// Two-way map between Wikidata items and per-language titles.
class QidIndex {
 public:
  std::optional<Qid> Find(std::string_view language,
                          std::string_view title) const;
  // language -> title, or null if the item has no sitelinks.
  const std::map<std::string, std::string> *Sitelinks(Qid qid) const;
  std::optional<std::string_view> Title(Qid qid,
                                        std::string_view language) const;

  size_t num_items() const { return items_.size(); }
  size_t num_sitelinks() const { return by_title_.size(); }
  const QidIndexStats &stats() const { return stats_; }

 private:
  friend class QidIndexBuilder;
  static std::string Key(std::string_view language, std::string_view title);

  std::unordered_map<std::string, Qid> by_title_;
  std::unordered_map<Qid, std::map<std::string, std::string>, QidHash> items_;
  QidIndexStats stats_;
};

// A conflicting duplicate, either the same (qid, language) with a different
// title or the same (language, title) with a different qid, aborts in strict
// mode and keeps the first record in lenient mode.
class QidIndexBuilder {
 public:
  explicit QidIndexBuilder(ParseMode mode = ParseMode::kLenient)
      : issues_(mode) {}

  void Add(const SitelinkRecord &record);
  QidIndex Finish();

  RowIssues &issues() { return issues_; }

 private:
  QidIndex index_;
  RowIssues issues_;
};

// Tab-separated (qid, language, title). An optional header row starting with
// "qid" is skipped.
QidIndex LoadSitelinks(std::istream &in, ParseMode mode = ParseMode::kLenient);
QidIndex LoadSitelinks(std::span<const SitelinkRecord> records,
                       ParseMode mode = ParseMode::kLenient);

// ---------------------------------------------------------------------------
// pageviews

enum class ReferrerClass : uint8_t {
  kInternal,
  kExternal,
  kUnknown,
  kAll,
};

std::string_view ReferrerName(ReferrerClass r);
std::optional<ReferrerClass> ParseReferrer(std::string_view name);

struct PageviewRecord {
  std::string language;
  PageId page_id = 0;
  Month month;
  ReferrerClass referrer = ReferrerClass::kAll;
  uint64_t views = 0;
};

class PageviewTable {
 public:
  // Returns false if the key is already present.
  bool Insert(const PageviewRecord &record);

  std::optional<uint64_t> Find(std::string_view language, PageId page,
                               Month month, ReferrerClass referrer) const;

  // Views with missing rows imputed as zero. When no explicit `all` row
  // exists, the `all` count is the sum of the three referrer classes.
  uint64_t Views(std::string_view language, PageId page, Month month,
                 ReferrerClass referrer) const;

  size_t size() const { return views_.size(); }

  // Records in a deterministic order.
  std::vector<PageviewRecord> Records() const;

 private:
  struct Key {
    uint32_t language;
    uint8_t referrer;
    int32_t month;
    PageId page;
    bool operator==(const Key &) const = default;
  };
  struct KeyHash {
    size_t operator()(const Key &k) const;
  };

  std::optional<uint32_t> LanguageId(std::string_view language) const;

  std::unordered_map<std::string, uint32_t> language_ids_;
  std::vector<std::string> languages_;
  std::unordered_map<Key, uint64_t, KeyHash> views_;
};

// Tab-separated (language, page_id, month, referrer_class, views). Negative
// views, unknown referrer classes, malformed months and duplicate keys are
// row errors.
PageviewTable LoadPageviews(std::istream &in,
                            ParseMode mode = ParseMode::kLenient,
                            RowIssues *issues = nullptr);

// ---------------------------------------------------------------------------
// features

enum class Topic : int {
  kCulture,
  kGeography,
  kHistorySociety,
  kStem,
};
constexpr int kNumTopics = 4;

// A topic label is assigned when its predicted probability exceeds this.
constexpr double kTopicThreshold = 0.5;

struct FeatureRecord {
  std::string language;
  PageId page_id = 0;
  bool bot_created = false;
  // Only set for biographies.
  std::optional<bool> is_woman_biography;
  std::array<double, kNumTopics> topic_probabilities{};
  std::array<bool, kNumTopics> topic_labels{};
  double quality_score = 0.0;
  int64_t creation_timestamp = 0;
};

// Tab-separated (language, page_id, bot_created, is_woman_biography|NA,
// p_culture, p_geography, p_history_society, p_stem, quality_score,
// creation_timestamp). Topic labels are thresholded on load.
std::vector<FeatureRecord> LoadFeatures(std::istream &in,
                                        ParseMode mode = ParseMode::kLenient,
                                        RowIssues *issues = nullptr);

}  // namespace oatlas

#endif  // OATLAS_INGEST_H_
