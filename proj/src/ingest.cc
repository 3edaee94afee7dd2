#include "oatlas/ingest.h"

#include <algorithm>
#include <tuple>

#include "oatlas/tsv.h"

namespace oatlas {

void RowIssues::Report(const std::string &message) {
  if (mode_ == ParseMode::kStrict) throw DataError(message);
  ++count_;
  if (samples_.size() < kMaxSamples) samples_.push_back(message);
}

// ---------------------------------------------------------------------------
// page table

const PageRecord *PageTable::Find(PageId id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &it->second;
}

std::optional<PageId> PageTable::FindTitle(std::string_view title) const {
  auto it = by_title_.find(std::string(title));
  if (it == by_title_.end()) return std::nullopt;
  return it->second;
}

void PageTableBuilder::Add(const SqlRow &row) {
  ++table_.stats_.rows;
  if (row.size() < 4 || !row[0].is_integer() || !row[1].is_integer() ||
      !row[2].is_string() || !row[3].is_integer() || row[0].integer <= 0 ||
      row[2].text.empty()) {
    ++table_.stats_.bad_rows;
    issues_.Report("page row " + std::to_string(table_.stats_.rows) +
                   ": expected (page_id > 0, namespace, title, is_redirect)");
    return;
  }
  if (row[1].integer != kMainNamespace) {
    ++table_.stats_.non_main;
    return;
  }
  PageRecord record;
  record.page_id = static_cast<PageId>(row[0].integer);
  record.namespace_id = static_cast<int>(row[1].integer);
  record.title = row[2].text;
  record.is_redirect = row[3].integer != 0;
  Insert(std::move(record));
}

void PageTableBuilder::Add(PageRecord record) {
  ++table_.stats_.rows;
  if (record.namespace_id != kMainNamespace) {
    ++table_.stats_.non_main;
    return;
  }
  Insert(std::move(record));
}

void PageTableBuilder::Insert(PageRecord record) {
  PageTableStats &stats = table_.stats_;
  auto by_id = table_.by_id_.find(record.page_id);
  if (by_id != table_.by_id_.end()) {
    ++stats.duplicates;
    issues_.Report("duplicate page_id " + std::to_string(record.page_id));
    table_.by_title_.erase(by_id->second.title);
    table_.by_id_.erase(by_id);
  }
  auto by_title = table_.by_title_.find(record.title);
  if (by_title != table_.by_title_.end()) {
    ++stats.duplicates;
    issues_.Report("duplicate title '" + record.title + "'");
    table_.by_id_.erase(by_title->second);
    table_.by_title_.erase(by_title);
  }
  table_.by_title_.emplace(record.title, record.page_id);
  PageId id = record.page_id;
  table_.by_id_.emplace(id, std::move(record));
}

PageTable PageTableBuilder::Finish() { return std::move(table_); }

PageTable LoadPageTable(std::span<const SqlRow> rows, ParseMode mode) {
  PageTableBuilder builder(mode);
  for (const SqlRow &row : rows) builder.Add(row);
  return builder.Finish();
}

PageTable LoadPageTable(SqlRowReader &reader, ParseMode mode) {
  PageTableBuilder builder(mode);
  SqlRow row;
  while (reader.Next(row)) builder.Add(row);
  return builder.Finish();
}

// ---------------------------------------------------------------------------
// redirect table

namespace {

bool DecodeRedirectRow(const SqlRow &row, RedirectRecord &record) {
  if (row.size() < 3 || !row[0].is_integer() || !row[1].is_integer() ||
      !row[2].is_string() || row[0].integer <= 0) {
    return false;
  }
  record.from_page_id = static_cast<PageId>(row[0].integer);
  record.target_namespace = static_cast<int>(row[1].integer);
  record.target_title = row[2].text;
  return true;
}

class RedirectResolver {
 public:
  RedirectResolver(const PageTable &pages, ParseMode mode)
      : pages_(pages), issues_(mode) {}

  void Add(const RedirectRecord &record) {
    RedirectStats &stats = map_.stats;
    ++stats.rows;
    const PageRecord *source = pages_.Find(record.from_page_id);
    if (source == nullptr || !source->is_redirect) {
      ++stats.dropped_unknown_source;
      return;
    }
    if (record.target_namespace != kMainNamespace) {
      ++stats.dropped_non_main_target;
      return;
    }
    std::optional<PageId> target = pages_.FindTitle(record.target_title);
    if (!target) {
      ++stats.dropped_missing_target;
      return;
    }
    auto [it, inserted] = map_.targets.emplace(record.from_page_id, *target);
    if (!inserted && it->second != *target) {
      issues_.Report("conflicting redirect rows for page " +
                     std::to_string(record.from_page_id));
      it->second = *target;
    }
  }

  void AddRow(const SqlRow &row) {
    RedirectRecord record;
    if (!DecodeRedirectRow(row, record)) {
      ++map_.stats.rows;
      ++map_.stats.bad_rows;
      issues_.Report("redirect row " + std::to_string(map_.stats.rows) +
                     ": expected (rd_from, rd_namespace, rd_title)");
      return;
    }
    Add(record);
  }

  RedirectMap Finish() { return std::move(map_); }

 private:
  const PageTable &pages_;
  RowIssues issues_;
  RedirectMap map_;
};

}  // namespace

RedirectMap LoadRedirects(std::span<const SqlRow> rows, const PageTable &pages,
                          ParseMode mode) {
  RedirectResolver resolver(pages, mode);
  for (const SqlRow &row : rows) resolver.AddRow(row);
  return resolver.Finish();
}

RedirectMap LoadRedirects(SqlRowReader &reader, const PageTable &pages,
                          ParseMode mode) {
  RedirectResolver resolver(pages, mode);
  SqlRow row;
  while (reader.Next(row)) resolver.AddRow(row);
  return resolver.Finish();
}

RedirectMap ResolveRedirectRecords(std::span<const RedirectRecord> records,
                                   const PageTable &pages) {
  RedirectResolver resolver(pages, ParseMode::kLenient);
  for (const RedirectRecord &record : records) resolver.Add(record);
  return resolver.Finish();
}

// ---------------------------------------------------------------------------
// pagelinks

bool DecodePagelinkRow(const SqlRow &row, RawLink &link) {
  if (row.size() < 3 || !row[0].is_integer() || !row[1].is_integer() ||
      !row[2].is_string() || row[0].integer <= 0 || row[2].text.empty()) {
    return false;
  }
  link.from_page_id = static_cast<PageId>(row[0].integer);
  link.target_namespace = static_cast<int>(row[1].integer);
  link.target_title = row[2].text;
  return true;
}

// ---------------------------------------------------------------------------
// sitelinks

std::optional<Qid> Qid::Parse(std::string_view text) {
  if (text.size() < 2 || text[0] != 'Q') return std::nullopt;
  std::optional<uint64_t> v = ParseUnsigned(text.substr(1));
  if (!v) return std::nullopt;
  return Qid(*v);
}

std::string QidIndex::Key(std::string_view language, std::string_view title) {
  std::string key;
  key.reserve(language.size() + title.size() + 1);
  key.append(language);
  key.push_back('\t');
  key.append(title);
  return key;
}

std::optional<Qid> QidIndex::Find(std::string_view language,
                                  std::string_view title) const {
  auto it = by_title_.find(Key(language, title));
  if (it == by_title_.end()) return std::nullopt;
  return it->second;
}

const std::map<std::string, std::string> *QidIndex::Sitelinks(Qid qid) const {
  auto it = items_.find(qid);
  return it == items_.end() ? nullptr : &it->second;
}

std::optional<std::string_view> QidIndex::Title(
    Qid qid, std::string_view language) const {
  const auto *links = Sitelinks(qid);
  if (links == nullptr) return std::nullopt;
  auto it = links->find(std::string(language));
  if (it == links->end()) return std::nullopt;
  return std::string_view(it->second);
}

void QidIndexBuilder::Add(const SitelinkRecord &record) {
  QidIndexStats &stats = index_.stats_;
  ++stats.rows;
  std::string key = QidIndex::Key(record.language, record.title);
  auto &links = index_.items_[record.qid];
  auto existing = links.find(record.language);
  auto by_title = index_.by_title_.find(key);
  bool same_title =
      existing != links.end() && existing->second == record.title;
  bool same_qid = by_title != index_.by_title_.end() &&
                  by_title->second == record.qid;
  if (same_title && same_qid) {
    ++stats.exact_duplicates;
    return;
  }
  if (existing != links.end() || by_title != index_.by_title_.end()) {
    ++stats.conflicts;
    if (links.empty()) index_.items_.erase(record.qid);
    issues_.Report("conflicting sitelink " + record.qid.ToString() + " " +
                   record.language + " '" + record.title + "'");
    return;  // first record wins
  }
  links.emplace(record.language, record.title);
  index_.by_title_.emplace(std::move(key), record.qid);
}

QidIndex QidIndexBuilder::Finish() { return std::move(index_); }

QidIndex LoadSitelinks(std::istream &in, ParseMode mode) {
  QidIndexBuilder builder(mode);
  TsvReader reader(in);
  std::vector<std::string_view> f;
  bool first = true;
  while (reader.Next(f)) {
    if (first && !f.empty() && f[0] == "qid") {
      first = false;
      continue;
    }
    first = false;
    std::optional<Qid> qid = f.size() >= 3 ? Qid::Parse(f[0]) : std::nullopt;
    if (!qid || f[1].empty() || f[2].empty()) {
      builder.issues().Report("sitelinks line " + std::to_string(reader.line_number()) +
                  ": expected qid, language, title");
      continue;
    }
    builder.Add(SitelinkRecord{*qid, std::string(f[1]), TsvUnescape(f[2])});
  }
  return builder.Finish();
}

QidIndex LoadSitelinks(std::span<const SitelinkRecord> records,
                       ParseMode mode) {
  QidIndexBuilder builder(mode);
  for (const SitelinkRecord &r : records) builder.Add(r);
  return builder.Finish();
}

// ---------------------------------------------------------------------------
// pageviews

std::string_view ReferrerName(ReferrerClass r) {
  switch (r) {
    case ReferrerClass::kInternal:
      return "internal";
    case ReferrerClass::kExternal:
      return "external";
    case ReferrerClass::kUnknown:
      return "unknown";
    case ReferrerClass::kAll:
      return "all";
  }
  return "all";
}

std::optional<ReferrerClass> ParseReferrer(std::string_view name) {
  if (name == "internal") return ReferrerClass::kInternal;
  if (name == "external") return ReferrerClass::kExternal;
  if (name == "unknown") return ReferrerClass::kUnknown;
  if (name == "all") return ReferrerClass::kAll;
  return std::nullopt;
}

size_t PageviewTable::KeyHash::operator()(const Key &k) const {
  uint64_t h = k.page * 0x9E3779B97F4A7C15ull;
  h ^= (static_cast<uint64_t>(k.language) << 40) ^
       (static_cast<uint64_t>(static_cast<uint32_t>(k.month)) << 8) ^
       k.referrer;
  h *= 0xBF58476D1CE4E5B9ull;
  return static_cast<size_t>(h ^ (h >> 31));
}

std::optional<uint32_t> PageviewTable::LanguageId(
    std::string_view language) const {
  auto it = language_ids_.find(std::string(language));
  if (it == language_ids_.end()) return std::nullopt;
  return it->second;
}

bool PageviewTable::Insert(const PageviewRecord &record) {
  auto [it, added] = language_ids_.emplace(
      record.language, static_cast<uint32_t>(languages_.size()));
  if (added) languages_.push_back(record.language);
  Key key{it->second, static_cast<uint8_t>(record.referrer),
          record.month.MonthsSince(Month(0, 1)), record.page_id};
  return views_.emplace(key, record.views).second;
}

std::optional<uint64_t> PageviewTable::Find(std::string_view language,
                                            PageId page, Month month,
                                            ReferrerClass referrer) const {
  std::optional<uint32_t> lang = LanguageId(language);
  if (!lang) return std::nullopt;
  Key key{*lang, static_cast<uint8_t>(referrer), month.MonthsSince(Month(0, 1)),
          page};
  auto it = views_.find(key);
  if (it == views_.end()) return std::nullopt;
  return it->second;
}

uint64_t PageviewTable::Views(std::string_view language, PageId page,
                              Month month, ReferrerClass referrer) const {
  if (std::optional<uint64_t> v = Find(language, page, month, referrer)) {
    return *v;
  }
  if (referrer != ReferrerClass::kAll) return 0;
  uint64_t total = 0;
  for (ReferrerClass r : {ReferrerClass::kInternal, ReferrerClass::kExternal,
                          ReferrerClass::kUnknown}) {
    total += Find(language, page, month, r).value_or(0);
  }
  return total;
}

std::vector<PageviewRecord> PageviewTable::Records() const {
  std::vector<PageviewRecord> out;
  out.reserve(views_.size());
  for (const auto &[key, views] : views_) {
    PageviewRecord r;
    r.language = languages_[key.language];
    r.page_id = key.page;
    r.month = Month(0, 1).Plus(key.month);
    r.referrer = static_cast<ReferrerClass>(key.referrer);
    r.views = views;
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
    return std::tie(a.language, a.page_id, a.month, a.referrer) <
           std::tie(b.language, b.page_id, b.month, b.referrer);
  });
  return out;
}

PageviewTable LoadPageviews(std::istream &in, ParseMode mode,
                            RowIssues *issues) {
  RowIssues local(mode);
  RowIssues &sink = issues != nullptr ? *issues : local;
  PageviewTable table;
  TsvReader reader(in);
  std::vector<std::string_view> f;
  bool first = true;
  while (reader.Next(f)) {
    if (first && !f.empty() && f[0] == "language") {
      first = false;
      continue;
    }
    first = false;
    std::string where = "pageviews line " + std::to_string(reader.line_number());
    if (f.size() != 5) {
      sink.Report(where + ": expected 5 columns");
      continue;
    }
    std::optional<uint64_t> page = ParseUnsigned(f[1]);
    std::optional<Month> month = Month::Parse(f[2]);
    std::optional<ReferrerClass> referrer = ParseReferrer(f[3]);
    std::optional<int64_t> views = ParseInt(f[4]);
    if (f[0].empty() || !page || *page == 0) {
      sink.Report(where + ": bad language or page_id");
    } else if (!month) {
      sink.Report(where + ": bad month '" + std::string(f[2]) + "'");
    } else if (!referrer) {
      sink.Report(where + ": unknown referrer class '" + std::string(f[3]) +
                  "'");
    } else if (!views || *views < 0) {
      sink.Report(where + ": views must be a non-negative integer");
    } else if (!table.Insert(PageviewRecord{std::string(f[0]), *page, *month,
                                            *referrer,
                                            static_cast<uint64_t>(*views)})) {
      sink.Report(where + ": duplicate pageview key");
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// features

std::vector<FeatureRecord> LoadFeatures(std::istream &in, ParseMode mode,
                                        RowIssues *issues) {
  RowIssues local(mode);
  RowIssues &sink = issues != nullptr ? *issues : local;
  std::vector<FeatureRecord> records;
  std::unordered_map<std::string, size_t> seen;
  TsvReader reader(in);
  std::vector<std::string_view> f;
  bool first = true;
  while (reader.Next(f)) {
    if (first && !f.empty() && f[0] == "language") {
      first = false;
      continue;
    }
    first = false;
    std::string where = "features line " + std::to_string(reader.line_number());
    if (f.size() != 10) {
      sink.Report(where + ": expected 10 columns");
      continue;
    }
    FeatureRecord r;
    r.language = std::string(f[0]);
    std::optional<uint64_t> page = ParseUnsigned(f[1]);
    std::optional<bool> bot = ParseBool(f[2]);
    bool ok = !r.language.empty() && page && *page > 0 && bot;
    if (ok) {
      r.page_id = *page;
      r.bot_created = *bot;
      if (f[3] != "NA" && !f[3].empty()) {
        std::optional<bool> woman = ParseBool(f[3]);
        ok = woman.has_value();
        r.is_woman_biography = woman;
      }
    }
    for (int t = 0; ok && t < kNumTopics; ++t) {
      std::optional<double> p = ParseDouble(f[4 + t]);
      ok = p && *p >= 0.0 && *p <= 1.0;
      if (ok) {
        r.topic_probabilities[t] = *p;
        r.topic_labels[t] = *p > kTopicThreshold;
      }
    }
    if (ok) {
      std::optional<double> q = ParseDouble(f[8]);
      std::optional<int64_t> ts = ParseInt(f[9]);
      ok = q && *q >= 0.0 && *q <= 1.0 && ts && *ts >= 0;
      if (ok) {
        r.quality_score = *q;
        r.creation_timestamp = *ts;
      }
    }
    if (!ok) {
      sink.Report(where + ": malformed or out-of-range feature value");
      continue;
    }
    std::string key = r.language + "\t" + std::to_string(r.page_id);
    if (!seen.emplace(key, records.size()).second) {
      sink.Report(where + ": duplicate (language, page_id)");
      continue;
    }
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace oatlas
