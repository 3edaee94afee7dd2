#ifndef OATLAS_CHARACTERIZE_H_
#define OATLAS_CHARACTERIZE_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oatlas/graph.h"
#include "oatlas/ingest.h"

namespace oatlas {

enum class Feature : int {
  kBotCreated,
  kWomanBiography,
  kTopicCulture,
  kTopicGeography,
  kTopicHistorySociety,
  kTopicStem,
  kHighQuality,
  kOldArticle,
};
constexpr int kNumFeatures = 8;

std::string_view FeatureName(Feature f);

// Binary article features of one language. A missing value means the feature
// is undefined for that article (gender outside biographies).
struct FeatureRow {
  PageId page_id = 0;
  std::array<std::optional<bool>, kNumFeatures> values{};
};

struct FeatureTable {
  std::string language;
  std::vector<FeatureRow> rows;  // ascending page id
};

// Lower of the two middle order statistics for even counts. Requires a
// non-empty input.
double LowerMedian(std::span<const double> values);

// true iff the value is strictly greater than LowerMedian(values); ties go to
// false. Throws std::invalid_argument on empty input.
std::vector<bool> BinarizeByMedian(std::span<const double> values);
std::map<PageId, bool> BinarizeByMedian(const std::map<PageId, double> &values);

// Rows for `language`, optionally restricted to articles of `snapshot`.
// Quality and age are split at their medians over the retained rows; an
// article is "old" when its age is above the median age.
FeatureTable BuildFeatureTable(std::string language,
                               std::span<const FeatureRecord> records,
                               const LinkSnapshot *snapshot = nullptr);

// P(x|o) against P(x) for one feature. Counts only include rows where the
// feature is defined.
struct RepresentationScore {
  std::string language;
  Feature feature = Feature::kBotCreated;
  double p_x_given_o = 0.0;
  double p_x = 0.0;
  // ln(P(x|o) / P(x)); NaN when undefined, -inf when no orphan has x.
  double log_ratio = 0.0;
  bool defined = false;
  uint64_t n_orphans = 0;
  uint64_t n_rows = 0;
  uint64_t n_x = 0;
  uint64_t n_x_and_orphan = 0;
};

// One score per feature, in Feature order. `orphans` need not be sorted;
// orphans without a feature row are ignored.
std::vector<RepresentationScore> RepresentationScores(
    std::span<const PageId> orphans, const FeatureTable &table);

struct WikiSummary {
  std::string language;
  uint64_t n_articles = 0;
  uint64_t n_orphans = 0;
  uint64_t n_deadends = 0;
  double orphan_fraction = 0.0;
  double deadend_fraction = 0.0;
};

WikiSummary SummarizeWiki(const LinkSnapshot &snapshot);

// One row per snapshot, largest wiki first (ties by language code). Throws
// std::invalid_argument if a language appears twice.
std::vector<WikiSummary> OrphanFractionByWiki(
    std::span<const LinkSnapshot *const> snapshots);

}  // namespace oatlas

#endif  // OATLAS_CHARACTERIZE_H_
