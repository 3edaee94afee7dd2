#include "oatlas/graph.h"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace oatlas {

// ---------------------------------------------------------------------------
// LinkSnapshot

LinkSnapshot LinkSnapshot::FromEdges(std::string language, Month month,
                                     std::vector<PageId> articles,
                                     std::span<const Edge> edges,
                                     EdgeFilterStats *stats) {
  EdgeFilterStats local;
  EdgeFilterStats &counts = stats != nullptr ? *stats : local;
  std::sort(articles.begin(), articles.end());
  articles.erase(std::unique(articles.begin(), articles.end()),
                 articles.end());

  LinkSnapshot snapshot;
  snapshot.language_ = std::move(language);
  snapshot.month_ = month;
  snapshot.articles_ = std::move(articles);

  std::vector<std::pair<uint32_t, uint32_t>> dense;
  dense.reserve(edges.size());
  for (const Edge &e : edges) {
    std::optional<uint32_t> from = snapshot.IndexOf(e.from);
    std::optional<uint32_t> to = snapshot.IndexOf(e.to);
    if (!from || !to) {
      ++counts.dangling;
    } else if (*from == *to) {
      ++counts.self_loops;
    } else {
      dense.emplace_back(*from, *to);
    }
  }
  std::sort(dense.begin(), dense.end());
  auto last = std::unique(dense.begin(), dense.end());
  counts.duplicates += dense.end() - last;
  dense.erase(last, dense.end());

  size_t n = snapshot.articles_.size();
  snapshot.offsets_.assign(n + 1, 0);
  snapshot.targets_.reserve(dense.size());
  for (const auto &[from, to] : dense) {
    ++snapshot.offsets_[from + 1];
    snapshot.targets_.push_back(to);
  }
  for (size_t i = 0; i < n; ++i) {
    snapshot.offsets_[i + 1] += snapshot.offsets_[i];
  }
  snapshot.CountInDegrees();
  return snapshot;
}

LinkSnapshot LinkSnapshot::FromAdjacency(std::string language, Month month,
                                         std::vector<PageId> articles,
                                         std::vector<uint64_t> offsets,
                                         std::vector<uint32_t> targets) {
  LinkSnapshot snapshot;
  snapshot.language_ = std::move(language);
  snapshot.month_ = month;
  snapshot.articles_ = std::move(articles);
  snapshot.offsets_ = std::move(offsets);
  snapshot.targets_ = std::move(targets);
  if (snapshot.offsets_.size() != snapshot.articles_.size() + 1 ||
      snapshot.offsets_.front() != 0 ||
      snapshot.offsets_.back() != snapshot.targets_.size()) {
    throw DataError("adjacency offsets do not match the article table");
  }
  snapshot.CountInDegrees();
  std::string why;
  if (!snapshot.Validate(&why)) throw DataError("invalid adjacency: " + why);
  return snapshot;
}

void LinkSnapshot::CountInDegrees() {
  in_degree_.assign(articles_.size(), 0);
  for (uint32_t t : targets_) {
    if (t < in_degree_.size()) ++in_degree_[t];
  }
}

std::optional<uint32_t> LinkSnapshot::IndexOf(PageId page) const {
  auto it = std::lower_bound(articles_.begin(), articles_.end(), page);
  if (it == articles_.end() || *it != page) return std::nullopt;
  return static_cast<uint32_t>(it - articles_.begin());
}

bool LinkSnapshot::HasEdge(PageId from, PageId to) const {
  std::optional<uint32_t> f = IndexOf(from);
  std::optional<uint32_t> t = IndexOf(to);
  if (!f || !t) return false;
  auto links = OutLinks(*f);
  return std::binary_search(links.begin(), links.end(), *t);
}

std::vector<Edge> LinkSnapshot::Edges() const {
  std::vector<Edge> edges;
  edges.reserve(targets_.size());
  ForEachEdge([&](const Edge &e) { edges.push_back(e); });
  return edges;
}

bool LinkSnapshot::Validate(std::string *why) const {
  auto fail = [&](std::string message) {
    if (why != nullptr) *why = std::move(message);
    return false;
  };
  size_t n = articles_.size();
  for (size_t i = 1; i < n; ++i) {
    if (articles_[i - 1] >= articles_[i]) {
      return fail("article ids not strictly ascending");
    }
  }
  if (offsets_.size() != n + 1 || offsets_.front() != 0 ||
      offsets_.back() != targets_.size()) {
    return fail("offsets inconsistent with targets");
  }
  std::vector<uint32_t> recount(n, 0);
  for (uint32_t i = 0; i < n; ++i) {
    if (offsets_[i] > offsets_[i + 1]) return fail("offsets not monotone");
    auto links = OutLinks(i);
    for (size_t k = 0; k < links.size(); ++k) {
      if (links[k] >= n) return fail("edge endpoint outside article set");
      if (links[k] == i) return fail("self-loop");
      if (k > 0 && links[k - 1] >= links[k]) {
        return fail("out-links not sorted or duplicated");
      }
      ++recount[links[k]];
    }
  }
  if (recount != in_degree_) return fail("in-degree counters out of sync");
  return true;
}

InLinkIndex::InLinkIndex(const LinkSnapshot &snapshot) {
  size_t n = snapshot.num_articles();
  offsets_.assign(n + 1, 0);
  for (uint32_t i = 0; i < n; ++i) offsets_[i + 1] = snapshot.InDegree(i);
  for (size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
  sources_.resize(snapshot.num_edges());
  std::vector<uint64_t> fill(offsets_.begin(), offsets_.end() - 1);
  // Sources come out ascending because the outer loop is ascending.
  for (uint32_t i = 0; i < n; ++i) {
    for (uint32_t j : snapshot.OutLinks(i)) sources_[fill[j]++] = i;
  }
}

// ---------------------------------------------------------------------------
// SnapshotBuilder

SnapshotBuilder::SnapshotBuilder(std::string language, Month month,
                                 const PageTable &pages,
                                 const RedirectMap &redirects, ParseMode mode)
    : language_(std::move(language)),
      month_(month),
      pages_(pages),
      issues_(mode) {
  for (const auto &[id, record] : pages.records()) {
    if (!record.is_redirect) articles_.push_back(id);
  }
  std::sort(articles_.begin(), articles_.end());
  index_.reserve(articles_.size());
  for (uint32_t i = 0; i < articles_.size(); ++i) index_[articles_[i]] = i;
  ResolveRedirects(pages, redirects);
}

void SnapshotBuilder::ResolveRedirects(const PageTable &pages,
                                       const RedirectMap &redirects) {
  std::vector<PageId> chain;
  for (const auto &[id, record] : pages.records()) {
    if (!record.is_redirect || redirect_target_.count(id) > 0) continue;
    chain.clear();
    PageId current = id;
    int64_t result = kMissing;
    for (;;) {
      auto article = index_.find(current);
      if (article != index_.end()) {
        result = article->second;
        break;
      }
      auto known = redirect_target_.find(current);
      if (known != redirect_target_.end()) {
        result = known->second;
        break;
      }
      if (std::find(chain.begin(), chain.end(), current) != chain.end()) {
        result = kCycle;
        break;
      }
      chain.push_back(current);
      auto next = redirects.targets.find(current);
      if (next == redirects.targets.end()) {
        result = kMissing;
        break;
      }
      current = next->second;
    }
    for (PageId p : chain) redirect_target_[p] = result;
  }
}

void SnapshotBuilder::Add(const RawLink &link) {
  ++stats_.raw_links;
  const PageRecord *source = pages_.Find(link.from_page_id);
  if (source == nullptr) {
    ++stats_.dropped_unknown_source;
    return;
  }
  if (source->is_redirect) {
    ++stats_.dropped_from_redirect;
    return;
  }
  if (link.target_namespace != kMainNamespace) {
    ++stats_.dropped_non_main_target;
    return;
  }
  std::optional<PageId> target_page = pages_.FindTitle(link.target_title);
  if (!target_page) {
    ++stats_.dropped_missing_target;
    return;
  }
  int64_t target;
  auto article = index_.find(*target_page);
  if (article != index_.end()) {
    target = article->second;
  } else {
    auto resolved = redirect_target_.find(*target_page);
    target = resolved == redirect_target_.end() ? kMissing : resolved->second;
    if (target == kCycle) {
      ++stats_.dropped_redirect_cycle;
      return;
    }
    if (target == kMissing) {
      ++stats_.dropped_missing_target;
      return;
    }
    ++stats_.resolved_via_redirect;
  }
  uint32_t from = index_.at(link.from_page_id);
  if (from == static_cast<uint32_t>(target)) {
    ++stats_.self_loops;
    return;
  }
  edges_.emplace_back(from, static_cast<uint32_t>(target));
}

void SnapshotBuilder::AddRow(const SqlRow &row) {
  RawLink link;
  if (!DecodePagelinkRow(row, link)) {
    ++stats_.bad_rows;
    issues_.Report("pagelinks row: expected (pl_from, pl_namespace, pl_title)");
    return;
  }
  Add(link);
}

LinkSnapshot SnapshotBuilder::Finish() {
  std::sort(edges_.begin(), edges_.end());
  auto last = std::unique(edges_.begin(), edges_.end());
  stats_.duplicates += edges_.end() - last;
  edges_.erase(last, edges_.end());
  stats_.edges = edges_.size();

  std::vector<uint64_t> offsets(articles_.size() + 1, 0);
  std::vector<uint32_t> targets;
  targets.reserve(edges_.size());
  for (const auto &[from, to] : edges_) {
    ++offsets[from + 1];
    targets.push_back(to);
  }
  for (size_t i = 0; i < articles_.size(); ++i) offsets[i + 1] += offsets[i];
  edges_.clear();
  edges_.shrink_to_fit();
  return LinkSnapshot::FromAdjacency(language_, month_, std::move(articles_),
                                     std::move(offsets), std::move(targets));
}

LinkSnapshot BuildSnapshot(std::string language, Month month,
                           const PageTable &pages, const RedirectMap &redirects,
                           std::span<const RawLink> links,
                           SnapshotBuildStats *stats) {
  SnapshotBuilder builder(std::move(language), month, pages, redirects);
  for (const RawLink &link : links) builder.Add(link);
  LinkSnapshot snapshot = builder.Finish();
  if (stats != nullptr) *stats = builder.stats();
  return snapshot;
}

// ---------------------------------------------------------------------------
// classification and change

std::vector<PageId> Orphans(const LinkSnapshot &snapshot) {
  std::vector<PageId> out;
  for (uint32_t i = 0; i < snapshot.num_articles(); ++i) {
    if (snapshot.InDegree(i) == 0) out.push_back(snapshot.PageAt(i));
  }
  return out;
}

std::vector<PageId> Deadends(const LinkSnapshot &snapshot) {
  std::vector<PageId> out;
  for (uint32_t i = 0; i < snapshot.num_articles(); ++i) {
    if (snapshot.OutDegree(i) == 0) out.push_back(snapshot.PageAt(i));
  }
  return out;
}

OrphanSet OrphanSet::Of(const LinkSnapshot &snapshot) {
  return OrphanSet{snapshot.language(), snapshot.month(), Orphans(snapshot)};
}

bool OrphanSet::Contains(PageId page) const {
  return std::binary_search(pages.begin(), pages.end(), page);
}

LinkDelta ComputeLinkDelta(const LinkSnapshot &before,
                           const LinkSnapshot &after) {
  if (before.language() != after.language()) {
    throw DataError("link delta across languages: " + before.language() +
                    " vs " + after.language());
  }
  LinkDelta delta;
  delta.language = before.language();
  delta.from_month = before.month();
  delta.to_month = after.month();
  std::vector<Edge> a = before.Edges();
  std::vector<Edge> b = after.Edges();
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(),
                      std::back_inserter(delta.added));
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(delta.removed));
  return delta;
}

std::vector<OrphanEvent> DeorphanizingEvents(const LinkDelta &delta,
                                             const OrphanSet &orphans) {
  if (delta.language != orphans.language ||
      delta.from_month != orphans.month) {
    throw std::invalid_argument(
        "orphan set does not belong to the delta's earlier snapshot");
  }
  // Added edges are unique, so counting them counts distinct sources.
  std::map<PageId, uint32_t> counts;
  for (const Edge &e : delta.added) {
    if (orphans.Contains(e.to)) ++counts[e.to];
  }
  std::vector<OrphanEvent> events;
  events.reserve(counts.size());
  for (const auto &[page, count] : counts) {
    events.push_back(OrphanEvent{delta.language, page, delta.from_month,
                                 EventDirection::kDeorphanized, count});
  }
  return events;
}

std::vector<OrphanEvent> OrphanizingEvents(const LinkSnapshot &before,
                                           const LinkSnapshot &after) {
  if (before.language() != after.language()) {
    throw DataError("orphanizing events across languages");
  }
  std::vector<OrphanEvent> events;
  for (uint32_t i = 0; i < before.num_articles(); ++i) {
    if (before.InDegree(i) == 0) continue;
    PageId page = before.PageAt(i);
    std::optional<uint32_t> j = after.IndexOf(page);
    if (j && after.InDegree(*j) == 0) {
      events.push_back(OrphanEvent{before.language(), page, before.month(),
                                   EventDirection::kOrphanized, 0});
    }
  }
  return events;
}

std::optional<double> DeorphanizationRate(const OrphanSet &orphans,
                                          std::span<const OrphanEvent> events) {
  if (orphans.pages.empty()) return std::nullopt;
  return static_cast<double>(events.size()) /
         static_cast<double>(orphans.pages.size());
}

std::vector<std::pair<uint32_t, double>> AddedIndegreeCdf(
    std::span<const OrphanEvent> events) {
  std::map<uint32_t, uint64_t> histogram;
  for (const OrphanEvent &e : events) {
    if (e.direction != EventDirection::kDeorphanized) {
      throw std::invalid_argument("added in-degree CDF needs de-orphanizations");
    }
    ++histogram[e.new_inlink_count];
  }
  std::vector<std::pair<uint32_t, double>> cdf;
  uint64_t running = 0;
  for (const auto &[k, n] : histogram) {
    running += n;
    cdf.emplace_back(k, running == events.size()
                            ? 1.0
                            : static_cast<double>(running) /
                                  static_cast<double>(events.size()));
  }
  return cdf;
}

}  // namespace oatlas
