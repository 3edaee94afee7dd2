#include "oatlas/graph.h"

#include <gtest/gtest.h>

#include <numeric>

#include "testing/fixtures.h"
#include "testing/oracles.h"

namespace oatlas {
namespace {

using testing::EdgeList;
using testing::M;
using testing::Rng;
using testing::ToEdgeSet;

PageTable Pages(std::initializer_list<PageRecord> records) {
  PageTableBuilder b(ParseMode::kStrict);
  for (const PageRecord &r : records) b.Add(r);
  return b.Finish();
}

LinkSnapshot Snap(std::vector<PageId> articles, std::vector<Edge> edges,
                  Month month = M("2022-11"), std::string lang = "xx") {
  return LinkSnapshot::FromEdges(lang, month, articles, edges);
}

std::vector<PageId> Sorted(std::set<PageId> s) { return {s.begin(), s.end()}; }

LinkSnapshot BuildFromFixture(const testing::WikiFixture &wiki,
                              SnapshotBuildStats *stats = nullptr) {
  PageTable pages = LoadPageTable(testing::PageRows(wiki), ParseMode::kStrict);
  RedirectMap redirects = LoadRedirects(testing::RedirectRows(wiki), pages);
  return BuildSnapshot(wiki.language, wiki.month, pages, redirects, wiki.links, stats);
}

TEST(BuildSnapshot, OneHopRedirect) {
  PageTable pages = Pages({{1, 0, "A", false}, {2, 0, "B", false}, {3, 0, "R", true}});
  RedirectMap redirects = ResolveRedirectRecords({{{3, 0, "B"}}}, pages);
  LinkSnapshot s = BuildSnapshot("xx", M("2022-11"), pages, redirects, {{{1, 0, "R"}}});
  EXPECT_EQ(s.Edges(), (std::vector<Edge>{{1, 2}}));
  EXPECT_EQ(std::vector<PageId>(s.articles().begin(), s.articles().end()),
            (std::vector<PageId>{1, 2}));
}

TEST(BuildSnapshot, RedirectCycleDropped) {
  PageTable pages = Pages({{1, 0, "A", false}, {2, 0, "R1", true}, {3, 0, "R2", true}});
  RedirectMap redirects =
      ResolveRedirectRecords({{{2, 0, "R2"}, {3, 0, "R1"}}}, pages);
  SnapshotBuildStats stats;
  LinkSnapshot s =
      BuildSnapshot("xx", M("2022-11"), pages, redirects, {{{1, 0, "R1"}}}, &stats);
  EXPECT_EQ(s.num_edges(), 0u);
  EXPECT_EQ(stats.dropped_redirect_cycle, 1u);
}

TEST(BuildSnapshot, DoubleRedirectAndDrops) {
  PageTable pages = Pages({{1, 0, "A", false},
                           {2, 0, "B", false},
                           {3, 0, "R1", true},
                           {4, 0, "R2", true},
                           {5, 0, "R3", true}});
  RedirectMap redirects = ResolveRedirectRecords(
      {{{3, 0, "R2"}, {4, 0, "B"}, {5, 0, "Nowhere"}}}, pages);
  std::vector<RawLink> links = {{1, 0, "R1"}, {1, 0, "B"},  {3, 0, "A"},
                                {1, 0, "R3"}, {1, 0, "Red"}, {1, 4, "B"},
                                {2, 0, "B"},  {9, 0, "A"}};
  SnapshotBuildStats stats;
  LinkSnapshot s = BuildSnapshot("xx", M("2022-11"), pages, redirects, links, &stats);
  EXPECT_EQ(s.Edges(), (std::vector<Edge>{{1, 2}}));
  EXPECT_EQ(stats.duplicates, 1u);
  EXPECT_EQ(stats.self_loops, 1u);
  EXPECT_EQ(stats.dropped_from_redirect, 1u);
  EXPECT_EQ(stats.dropped_non_main_target, 1u);
  EXPECT_EQ(stats.dropped_missing_target, 2u);
  EXPECT_EQ(stats.dropped_unknown_source, 1u);
}

// Random pages with a random redirect layer, each link resolved on its own by
// repeated lookup.
TEST(BuildSnapshot, MatchesChaseOracle) {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    auto wiki = testing::RandomWiki(
        rng, {.articles = 500, .redirects = 150, .non_main = 40, .links = 3000});
    SnapshotBuildStats stats;
    LinkSnapshot s = BuildFromFixture(wiki, &stats);
    auto oracle = testing::ChaseOracle(wiki);
    ASSERT_EQ(std::set<PageId>(s.articles().begin(), s.articles().end()),
              oracle.articles);
    ASSERT_EQ(ToEdgeSet(s), oracle.edges) << seed;
    ASSERT_EQ(stats.dropped_redirect_cycle, oracle.dropped_cycle) << seed;
    ASSERT_TRUE(s.Validate());
  }
}

TEST(Orphans, Examples) {
  LinkSnapshot s = Snap({1, 2, 3}, {{1, 2}});
  EXPECT_EQ(Orphans(s), (std::vector<PageId>{1, 3}));
  EXPECT_EQ(Deadends(s), (std::vector<PageId>{2, 3}));

  std::vector<Edge> complete;
  for (PageId a = 1; a <= 5; ++a) {
    for (PageId b = 1; b <= 5; ++b) {
      if (a != b) complete.push_back({a, b});
    }
  }
  EXPECT_TRUE(Orphans(Snap({1, 2, 3, 4, 5}, complete)).empty());
  EXPECT_TRUE(Deadends(Snap({1, 2}, {{1, 2}, {2, 1}})).empty());
}

TEST(Orphans, MatchesScanOracle) {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    EdgeList g = testing::RandomGraph(rng, 200, 0.01);
    LinkSnapshot s = testing::ToSnapshot(g, "xx", M("2022-11"));
    EXPECT_EQ(Orphans(s), Sorted(testing::OrphanOracle(g)));
    EXPECT_EQ(Deadends(s), Sorted(testing::DeadendOracle(g)));
  }
}

TEST(Snapshot, DegreeSumsAndPartition) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    EdgeList g = testing::RandomGraph(rng, 300, 0.02);
    LinkSnapshot s = testing::ToSnapshot(g, "xx", M("2022-11"));
    uint64_t in = 0, out = 0;
    for (uint32_t i = 0; i < s.num_articles(); ++i) {
      in += s.InDegree(i);
      out += s.OutDegree(i);
    }
    EXPECT_EQ(in, s.num_edges());
    EXPECT_EQ(out, s.num_edges());
    EXPECT_EQ(s.num_edges(), g.edges.size());

    auto orphans = Orphans(s);
    size_t linked = 0;
    for (uint32_t i = 0; i < s.num_articles(); ++i) linked += s.InDegree(i) >= 1;
    EXPECT_EQ(orphans.size() + linked, s.num_articles());
    InLinkIndex inlinks(s);
    for (uint32_t i = 0; i < s.num_articles(); ++i) {
      ASSERT_EQ(inlinks.InLinks(i).size(), s.InDegree(i));
      for (uint32_t j : inlinks.InLinks(i)) ASSERT_TRUE(s.HasEdge(s.PageAt(j), s.PageAt(i)));
    }
  }
}

TEST(Snapshot, FromEdgesFiltersBadEdges) {
  EdgeFilterStats stats;
  LinkSnapshot s = LinkSnapshot::FromEdges("xx", M("2022-11"), {3, 1, 2},
                                           std::vector<Edge>{{1, 2}, {1, 2}, {2, 2}, {1, 9}},
                                           &stats);
  EXPECT_EQ(s.Edges(), (std::vector<Edge>{{1, 2}}));
  EXPECT_EQ(stats.duplicates, 1u);
  EXPECT_EQ(stats.self_loops, 1u);
  EXPECT_EQ(s.num_articles(), 3u);
}

TEST(Snapshot, FromAdjacencyRejectsBadShape) {
  EXPECT_THROW(LinkSnapshot::FromAdjacency("xx", M("2022-11"), {2, 1}, {0, 0, 0}, {}),
               DataError);
  EXPECT_THROW(LinkSnapshot::FromAdjacency("xx", M("2022-11"), {1, 2}, {0, 2, 2}, {1, 1}),
               DataError);
  EXPECT_THROW(LinkSnapshot::FromAdjacency("xx", M("2022-11"), {1, 2}, {0, 1, 1}, {0}),
               DataError);
  EXPECT_NO_THROW(LinkSnapshot::FromAdjacency("xx", M("2022-11"), {1, 2}, {0, 1, 1}, {1}));
}

TEST(LinkDelta, Examples) {
  LinkSnapshot a = Snap({1, 2, 3}, {{1, 2}});
  LinkSnapshot b = Snap({1, 2, 3}, {{1, 2}, {3, 2}}, M("2022-12"));
  LinkDelta d = ComputeLinkDelta(a, b);
  EXPECT_EQ(d.added, (std::vector<Edge>{{3, 2}}));
  EXPECT_TRUE(d.removed.empty());
  LinkDelta same = ComputeLinkDelta(a, a);
  EXPECT_TRUE(same.added.empty());
  EXPECT_TRUE(same.removed.empty());
  EXPECT_THROW(ComputeLinkDelta(a, Snap({1}, {}, M("2022-12"), "yy")), DataError);
}

TEST(LinkDelta, MatchesSetDifferenceOracleAndReplays) {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    EdgeList g0 = testing::RandomGraph(rng, 250, 0.02);
    EdgeList g1 = testing::Evolve(rng, g0, 0.2);
    LinkSnapshot s0 = testing::ToSnapshot(g0, "xx", M("2022-11"));
    LinkSnapshot s1 = testing::ToSnapshot(g1, "xx", M("2022-12"));
    LinkDelta d = ComputeLinkDelta(s0, s1);
    auto oracle = testing::DeltaOracle(g0, g1);
    EXPECT_EQ(ToEdgeSet(d.added), oracle.added);
    EXPECT_EQ(ToEdgeSet(d.removed), oracle.removed);

    // E(t) - removed + added == E(t+1), and the two sets are disjoint.
    auto replay = ToEdgeSet(s0);
    for (const Edge &e : d.removed) ASSERT_EQ(replay.erase({e.from, e.to}), 1u);
    for (const Edge &e : d.added) ASSERT_TRUE(replay.insert({e.from, e.to}).second);
    EXPECT_EQ(replay, ToEdgeSet(s1));
  }
}

TEST(Events, DeorphanizingExamples) {
  LinkSnapshot a = Snap({1, 2, 3}, {});
  LinkSnapshot b = Snap({1, 2, 3}, {{1, 3}, {2, 3}}, M("2022-12"));
  auto events = DeorphanizingEvents(ComputeLinkDelta(a, b), OrphanSet{"xx", M("2022-11"), {3}});
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].page_id, 3u);
  EXPECT_EQ(events[0].new_inlink_count, 2u);
  EXPECT_EQ(events[0].direction, EventDirection::kDeorphanized);
  EXPECT_EQ(events[0].month, M("2022-11"));

  LinkSnapshot c = Snap({1, 2, 3}, {{1, 2}}, M("2022-12"));
  EXPECT_TRUE(
      DeorphanizingEvents(ComputeLinkDelta(a, c), OrphanSet{"xx", M("2022-11"), {3}})
          .empty());
}

TEST(Events, OrphanizingExamples) {
  LinkSnapshot a = Snap({1, 3}, {{1, 3}});
  LinkSnapshot b = Snap({1, 3}, {}, M("2022-12"));
  auto events = OrphanizingEvents(a, b);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].page_id, 3u);
  EXPECT_EQ(events[0].direction, EventDirection::kOrphanized);
  // Deleted in the later snapshot: no event.
  EXPECT_TRUE(OrphanizingEvents(a, Snap({1}, {}, M("2022-12"))).empty());
}

TEST(Events, MatchOracles) {
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    Rng rng(seed);
    EdgeList g0 = testing::RandomGraph(rng, 300, 0.006);
    EdgeList g1 = testing::Evolve(rng, g0, 0.3);
    LinkSnapshot s0 = testing::ToSnapshot(g0, "xx", M("2022-11"));
    LinkSnapshot s1 = testing::ToSnapshot(g1, "xx", M("2022-12"));
    const OrphanSet orphans = OrphanSet::Of(s0);
    auto deorph = DeorphanizingEvents(ComputeLinkDelta(s0, s1), orphans);
    std::map<PageId, uint32_t> got;
    for (const auto &e : deorph) {
      ASSERT_GE(e.new_inlink_count, 1u);
      got[e.page_id] = e.new_inlink_count;
    }
    EXPECT_EQ(got, testing::DeorphanizedOracle(g0, g1)) << seed;

    std::set<PageId> orph;
    for (const auto &e : OrphanizingEvents(s0, s1)) orph.insert(e.page_id);
    EXPECT_EQ(orph, testing::OrphanizedOracle(g0, g1)) << seed;

    // Targets were orphans at t and are not orphans at t+1.
    const OrphanSet after = OrphanSet::Of(s1);
    for (const auto &e : deorph) {
      EXPECT_TRUE(orphans.Contains(e.page_id));
      EXPECT_FALSE(after.Contains(e.page_id));
    }
  }
}

TEST(Events, RateAndCdf) {
  std::vector<PageId> pages(200);
  std::iota(pages.begin(), pages.end(), 1);
  OrphanSet orphans{"xx", M("2022-11"), pages};
  std::vector<OrphanEvent> one = {{"xx", 5, M("2022-11"), EventDirection::kDeorphanized, 1}};
  EXPECT_DOUBLE_EQ(*DeorphanizationRate(orphans, one), 0.005);
  EXPECT_EQ(DeorphanizationRate(orphans, {}), 0.0);
  EXPECT_FALSE(DeorphanizationRate(OrphanSet{}, {}).has_value());

  std::vector<OrphanEvent> events;
  for (uint32_t c : {1, 1, 1, 2}) {
    events.push_back({"xx", events.size() + 1, M("2022-11"), EventDirection::kDeorphanized, c});
  }
  auto cdf = AddedIndegreeCdf(events);
  ASSERT_EQ(cdf.size(), 2u);
  EXPECT_EQ(cdf[0].first, 1u);
  EXPECT_DOUBLE_EQ(cdf[0].second, 0.75);
  EXPECT_EQ(cdf[1].first, 2u);
  EXPECT_DOUBLE_EQ(cdf[1].second, 1.0);

  events.resize(3);
  cdf = AddedIndegreeCdf(events);
  ASSERT_EQ(cdf.size(), 1u);
  EXPECT_DOUBLE_EQ(cdf[0].second, 1.0);
  EXPECT_TRUE(AddedIndegreeCdf({}).empty());

  events.push_back({"xx", 9, M("2022-11"), EventDirection::kOrphanized, 0});
  EXPECT_THROW(AddedIndegreeCdf(events), std::invalid_argument);
}

TEST(Events, CdfIsMonotoneOnRandomCounts) {
  Rng rng(12);
  std::vector<OrphanEvent> events;
  for (int i = 0; i < 500; ++i) {
    events.push_back({"xx", static_cast<PageId>(i + 1), M("2022-11"),
                      EventDirection::kDeorphanized, static_cast<uint32_t>(1 + rng() % 7)});
  }
  auto cdf = AddedIndegreeCdf(events);
  for (size_t i = 1; i < cdf.size(); ++i) {
    EXPECT_LT(cdf[i - 1].first, cdf[i].first);
    EXPECT_LE(cdf[i - 1].second, cdf[i].second);
  }
  EXPECT_DOUBLE_EQ(cdf.back().second, 1.0);
}

}  // namespace
}  // namespace oatlas
