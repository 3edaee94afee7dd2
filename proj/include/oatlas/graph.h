#ifndef OATLAS_GRAPH_H_
#define OATLAS_GRAPH_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "oatlas/ingest.h"
#include "oatlas/month.h"

namespace oatlas {

struct Edge {
  PageId from = 0;
  PageId to = 0;
  friend auto operator<=>(const Edge &, const Edge &) = default;
};

struct EdgeFilterStats {
  uint64_t dangling = 0;  // an endpoint is not an article
  uint64_t self_loops = 0;
  uint64_t duplicates = 0;
};

// The link graph of one language at one monthly snapshot. Articles are
// main-namespace, non-redirect pages. Page ids are remapped to dense indices
// in ascending page-id order, and out-links are stored as sorted index lists,
// so edges enumerate in (from, to) page-id order.
//
// Immutable once built; all accessors are safe for concurrent readers.
class LinkSnapshot {
 public:
  LinkSnapshot() = default;

  // Edges with an endpoint outside `articles`, self-loops and duplicates are
  // dropped (and counted in `stats` if given).
  static LinkSnapshot FromEdges(std::string language, Month month,
                                std::vector<PageId> articles,
                                std::span<const Edge> edges,
                                EdgeFilterStats *stats = nullptr);

  // Takes a ready CSR: `articles` strictly ascending, `offsets` of size
  // articles+1, each target run strictly ascending. Throws DataError if any of
  // that does not hold.
  static LinkSnapshot FromAdjacency(std::string language, Month month,
                                    std::vector<PageId> articles,
                                    std::vector<uint64_t> offsets,
                                    std::vector<uint32_t> targets);

  const std::string &language() const { return language_; }
  Month month() const { return month_; }

  size_t num_articles() const { return articles_.size(); }
  uint64_t num_edges() const { return targets_.size(); }

  std::span<const PageId> articles() const { return articles_; }
  bool Contains(PageId page) const { return IndexOf(page).has_value(); }
  std::optional<uint32_t> IndexOf(PageId page) const;
  PageId PageAt(uint32_t index) const { return articles_[index]; }

  std::span<const uint32_t> OutLinks(uint32_t index) const {
    return {targets_.data() + offsets_[index],
            targets_.data() + offsets_[index + 1]};
  }
  uint32_t OutDegree(uint32_t index) const {
    return static_cast<uint32_t>(offsets_[index + 1] - offsets_[index]);
  }
  uint32_t InDegree(uint32_t index) const { return in_degree_[index]; }

  bool HasEdge(PageId from, PageId to) const;

  // All edges in (from, to) order.
  std::vector<Edge> Edges() const;

  template <typename Fn>
  void ForEachEdge(Fn &&fn) const {
    for (uint32_t i = 0; i < articles_.size(); ++i) {
      for (uint32_t j : OutLinks(i)) fn(Edge{articles_[i], articles_[j]});
    }
  }

  // Re-derives in-degrees from the adjacency and checks every structural
  // invariant. Returns false and sets `why` on the first violation.
  bool Validate(std::string *why = nullptr) const;

  std::span<const uint64_t> offsets() const { return offsets_; }
  std::span<const uint32_t> targets() const { return targets_; }

 private:
  void CountInDegrees();

  std::string language_;
  Month month_;
  std::vector<PageId> articles_;
  std::vector<uint64_t> offsets_{0};
  std::vector<uint32_t> targets_;
  std::vector<uint32_t> in_degree_;
};

// Inverse adjacency of a snapshot, built on demand.
class InLinkIndex {
 public:
  explicit InLinkIndex(const LinkSnapshot &snapshot);

  std::span<const uint32_t> InLinks(uint32_t index) const {
    return {sources_.data() + offsets_[index],
            sources_.data() + offsets_[index + 1]};
  }

 private:
  std::vector<uint64_t> offsets_;
  std::vector<uint32_t> sources_;
};

// ---------------------------------------------------------------------------
// building from dump tables

struct SnapshotBuildStats {
  uint64_t raw_links = 0;
  uint64_t edges = 0;
  uint64_t bad_rows = 0;
  uint64_t dropped_unknown_source = 0;  // source not a main-namespace page
  uint64_t dropped_from_redirect = 0;
  uint64_t dropped_non_main_target = 0;
  uint64_t dropped_missing_target = 0;  // red link, or redirect to nowhere
  uint64_t dropped_redirect_cycle = 0;
  uint64_t resolved_via_redirect = 0;
  uint64_t self_loops = 0;
  uint64_t duplicates = 0;
};

// Turns raw pagelinks into a LinkSnapshot. Redirect chains are followed to a
// fixpoint; links whose chain ends on a missing page or runs into a cycle are
// dropped. Links out of redirect pages are dropped.
class SnapshotBuilder {
 public:
  SnapshotBuilder(std::string language, Month month, const PageTable &pages,
                  const RedirectMap &redirects,
                  ParseMode mode = ParseMode::kLenient);

  void Add(const RawLink &link);
  void AddRow(const SqlRow &row);

  LinkSnapshot Finish();

  const SnapshotBuildStats &stats() const { return stats_; }
  const RowIssues &issues() const { return issues_; }

 private:
  static constexpr int64_t kMissing = -1;
  static constexpr int64_t kCycle = -2;

  void ResolveRedirects(const PageTable &pages, const RedirectMap &redirects);

  std::string language_;
  Month month_;
  const PageTable &pages_;
  RowIssues issues_;
  std::vector<PageId> articles_;
  std::unordered_map<PageId, uint32_t> index_;
  // Redirect page id -> dense index of its final target, or kMissing/kCycle.
  std::unordered_map<PageId, int64_t> redirect_target_;
  std::vector<std::pair<uint32_t, uint32_t>> edges_;
  SnapshotBuildStats stats_;
};

LinkSnapshot BuildSnapshot(std::string language, Month month,
                           const PageTable &pages, const RedirectMap &redirects,
                           std::span<const RawLink> links,
                           SnapshotBuildStats *stats = nullptr);

// ---------------------------------------------------------------------------
// classification and change

// Articles with no incoming links, ascending.
std::vector<PageId> Orphans(const LinkSnapshot &snapshot);
// Articles with no outgoing links, ascending.
std::vector<PageId> Deadends(const LinkSnapshot &snapshot);

struct OrphanSet {
  std::string language;
  Month month;
  std::vector<PageId> pages;  // ascending

  static OrphanSet Of(const LinkSnapshot &snapshot);
  bool Contains(PageId page) const;
};

struct LinkDelta {
  std::string language;
  Month from_month;
  Month to_month;
  std::vector<Edge> added;    // sorted
  std::vector<Edge> removed;  // sorted
};

// Edge-set differences between two snapshots of the same language. Throws
// DataError on a language mismatch.
LinkDelta ComputeLinkDelta(const LinkSnapshot &before,
                           const LinkSnapshot &after);

enum class EventDirection {
  kDeorphanized,
  kOrphanized,
};

struct OrphanEvent {
  std::string language;
  PageId page_id = 0;
  // Month of the earlier snapshot; the transition happens during it.
  Month month;
  EventDirection direction = EventDirection::kDeorphanized;
  // Distinct added in-links; zero for orphanized events.
  uint32_t new_inlink_count = 0;

  friend bool operator==(const OrphanEvent &, const OrphanEvent &) = default;
};

// One event per orphan of the earlier snapshot that gains at least one
// in-link in `delta`. Ordered by page id.
std::vector<OrphanEvent> DeorphanizingEvents(const LinkDelta &delta,
                                             const OrphanSet &orphans);

// Articles present in both snapshots that have in-links before and none
// after. Ordered by page id.
std::vector<OrphanEvent> OrphanizingEvents(const LinkSnapshot &before,
                                           const LinkSnapshot &after);

// Fraction of orphans de-orphanized; nullopt when there are no orphans.
std::optional<double> DeorphanizationRate(const OrphanSet &orphans,
                                          std::span<const OrphanEvent> events);

// Empirical CDF of new_inlink_count as (k, P(count <= k)) for every observed
// k, ascending. Throws std::invalid_argument on orphanized events.
std::vector<std::pair<uint32_t, double>> AddedIndegreeCdf(
    std::span<const OrphanEvent> events);

}  // namespace oatlas

#endif  // OATLAS_GRAPH_H_
