#ifndef OATLAS_TESTING_FIXTURES_H_
#define OATLAS_TESTING_FIXTURES_H_

#include <cstdint>
#include <map>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oatlas/catalog.h"
#include "oatlas/deorph.h"
#include "oatlas/did.h"
#include "oatlas/graph.h"
#include "oatlas/ingest.h"
#include "oatlas/month.h"
#include "oatlas/sql_dump.h"

namespace oatlas::testing {

using Rng = std::mt19937_64;

Month M(const char *text);

// ---------------------------------------------------------------------------
// dump-level wiki

struct WikiShape {
  int articles = 200;
  int redirects = 60;
  int non_main = 20;
  int links = 800;
};

// One wiki month as the dump tables describe it: pages of all namespaces,
// redirect rows (chains, cycles, dangling and non-main targets included) and
// raw links (red links, links out of redirects and non-main pages, self
// links and duplicates included).
struct WikiFixture {
  std::string language = "xx";
  Month month;
  std::vector<PageRecord> pages;
  std::vector<RedirectRecord> redirects;
  std::vector<RawLink> links;
};

WikiFixture RandomWiki(Rng &rng, const WikiShape &shape);

std::vector<SqlRow> PageRows(const WikiFixture &wiki);
std::vector<SqlRow> RedirectRows(const WikiFixture &wiki);
std::vector<SqlRow> PagelinkRows(const WikiFixture &wiki);

// MediaWiki dump writer written independently of the library's, for
// round-trip tests.
std::string DumpEscape(std::string_view s);
void WriteDump(std::ostream &out, std::string_view table,
               std::span<const SqlRow> rows, size_t rows_per_statement = 500);

// ---------------------------------------------------------------------------
// edge-list graphs

struct EdgeList {
  std::vector<PageId> articles;  // ascending
  std::vector<Edge> edges;       // no self loops, no duplicates
};

EdgeList RandomGraph(Rng &rng, int n, double p, PageId first_id = 1);

// The next month: a few articles deleted and created, edges removed and
// added.
EdgeList Evolve(Rng &rng, const EdgeList &g, double churn);

LinkSnapshot ToSnapshot(const EdgeList &g, std::string language, Month month);

// ---------------------------------------------------------------------------
// several languages sharing items

struct LanguageFixture {
  std::string language;
  EdgeList before;
  EdgeList after;
  std::map<PageId, Qid> qids;  // articles with an item
  LinkSnapshot before_snapshot;
  LinkSnapshot after_snapshot;
  ArticleCatalog catalog;
};

struct MultiWikiShape {
  int languages = 3;
  int items = 100;
  double item_coverage = 0.7;  // chance an item has an article in a language
  int unmapped_articles = 5;   // articles without an item, per language
  double edge_probability = 0.02;
  double churn = 0.0;          // 0: after == before
};

std::vector<LanguageFixture> RandomMultiWiki(Rng &rng, const MultiWikiShape &shape,
                                             Month month);

// Per-class views for every article of every language over [month - window,
// month + window], each row dropped with `missing_rate`; some cells also get
// an explicit `all` row.
std::vector<PageviewRecord> RandomPageviews(Rng &rng,
                                            std::span<const LanguageFixture> wikis,
                                            Month month, int window,
                                            double missing_rate);

PageviewTable ToTable(std::span<const PageviewRecord> records);

// ---------------------------------------------------------------------------
// findlink

struct PlantedMention {
  PageId source = 0;
  PageId target = 0;
  TextSpan span;
  friend auto operator<=>(const PlantedMention &, const PlantedMention &) = default;
};

struct FindlinkFixture {
  LinkSnapshot snapshot;
  ArticleCatalog catalog;
  std::vector<AnnotatedDocument> corpus;
  std::vector<PageId> orphans;
  // Every mention a correct matcher must report, and nothing else.
  std::vector<PlantedMention> planted;
};

FindlinkFixture PlantedCorpus(Rng &rng, int documents);

// ---------------------------------------------------------------------------
// synthetic difference-in-differences panels

struct SyntheticPanelOptions {
  size_t pairs = 5000;
  int window = 3;
  // Added to treated log views in every post period.
  double effect = 0.0;
  double pair_sd = 1.0;
  double role_offset = 0.3;
  double noise_sd = 0.5;
  // AR(1) coefficient of each article's noise over time.
  double autocorrelation = 0.3;
  int languages = 4;
};

// log views generated directly: pair effect + role offset + common period
// effect + effect * treated * post + AR(1) noise. Ordered like
// AssemblePanel output.
std::vector<PanelObservation> SyntheticPanel(Rng &rng,
                                             const SyntheticPanelOptions &options);

// A random panel with arbitrary cell means, for closed-form checks.
std::vector<PanelObservation> RandomTwoByTwoPanel(Rng &rng, size_t pairs, int window);

// ---------------------------------------------------------------------------
// features

std::vector<FeatureRecord> RandomFeatures(Rng &rng, std::string language,
                                          std::span<const PageId> pages);

}  // namespace oatlas::testing

#endif  // OATLAS_TESTING_FIXTURES_H_
