#include "oatlas/characterize.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace oatlas {

std::string_view FeatureName(Feature f) {
  switch (f) {
    case Feature::kBotCreated:
      return "bot_created";
    case Feature::kWomanBiography:
      return "is_woman_biography";
    case Feature::kTopicCulture:
      return "topic_culture";
    case Feature::kTopicGeography:
      return "topic_geography";
    case Feature::kTopicHistorySociety:
      return "topic_history_society";
    case Feature::kTopicStem:
      return "topic_stem";
    case Feature::kHighQuality:
      return "high_quality";
    case Feature::kOldArticle:
      return "old_article";
  }
  return "unknown";
}

double LowerMedian(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty set");
  std::vector<double> v(values.begin(), values.end());
  auto mid = v.begin() + (v.size() - 1) / 2;
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

std::vector<bool> BinarizeByMedian(std::span<const double> values) {
  double median = LowerMedian(values);
  std::vector<bool> out(values.size());
  for (size_t i = 0; i < values.size(); ++i) out[i] = values[i] > median;
  return out;
}

std::map<PageId, bool> BinarizeByMedian(const std::map<PageId, double> &values) {
  std::vector<double> v;
  v.reserve(values.size());
  for (const auto &[page, value] : values) v.push_back(value);
  double median = LowerMedian(v);
  std::map<PageId, bool> out;
  for (const auto &[page, value] : values) out.emplace(page, value > median);
  return out;
}

FeatureTable BuildFeatureTable(std::string language,
                               std::span<const FeatureRecord> records,
                               const LinkSnapshot *snapshot) {
  std::vector<const FeatureRecord *> kept;
  for (const FeatureRecord &r : records) {
    if (r.language != language) continue;
    if (snapshot != nullptr && !snapshot->Contains(r.page_id)) continue;
    kept.push_back(&r);
  }
  std::sort(kept.begin(), kept.end(),
            [](const FeatureRecord *a, const FeatureRecord *b) {
              return a->page_id < b->page_id;
            });

  FeatureTable table;
  table.language = std::move(language);
  if (kept.empty()) return table;

  std::vector<double> quality, age;
  int64_t newest = 0;
  for (const FeatureRecord *r : kept) newest = std::max(newest, r->creation_timestamp);
  for (const FeatureRecord *r : kept) {
    quality.push_back(r->quality_score);
    age.push_back(static_cast<double>(newest - r->creation_timestamp));
  }
  std::vector<bool> high_quality = BinarizeByMedian(quality);
  std::vector<bool> old_article = BinarizeByMedian(age);

  table.rows.reserve(kept.size());
  for (size_t i = 0; i < kept.size(); ++i) {
    const FeatureRecord &r = *kept[i];
    FeatureRow row;
    row.page_id = r.page_id;
    auto set = [&](Feature f, std::optional<bool> v) {
      row.values[static_cast<int>(f)] = v;
    };
    set(Feature::kBotCreated, r.bot_created);
    set(Feature::kWomanBiography, r.is_woman_biography);
    set(Feature::kTopicCulture, r.topic_labels[0]);
    set(Feature::kTopicGeography, r.topic_labels[1]);
    set(Feature::kTopicHistorySociety, r.topic_labels[2]);
    set(Feature::kTopicStem, r.topic_labels[3]);
    set(Feature::kHighQuality, static_cast<bool>(high_quality[i]));
    set(Feature::kOldArticle, static_cast<bool>(old_article[i]));
    table.rows.push_back(row);
  }
  return table;
}

std::vector<RepresentationScore> RepresentationScores(
    std::span<const PageId> orphans, const FeatureTable &table) {
  std::unordered_set<PageId> orphan_set(orphans.begin(), orphans.end());
  std::vector<RepresentationScore> scores;
  for (int f = 0; f < kNumFeatures; ++f) {
    RepresentationScore s;
    s.language = table.language;
    s.feature = static_cast<Feature>(f);
    for (const FeatureRow &row : table.rows) {
      const std::optional<bool> &v = row.values[f];
      if (!v) continue;
      bool is_orphan = orphan_set.count(row.page_id) > 0;
      ++s.n_rows;
      if (is_orphan) ++s.n_orphans;
      if (*v) {
        ++s.n_x;
        if (is_orphan) ++s.n_x_and_orphan;
      }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.p_x = s.n_rows > 0 ? static_cast<double>(s.n_x) / s.n_rows : nan;
    s.p_x_given_o =
        s.n_orphans > 0 ? static_cast<double>(s.n_x_and_orphan) / s.n_orphans
                        : nan;
    s.defined = s.n_orphans > 0 && s.n_x > 0;
    if (!s.defined) {
      s.log_ratio = nan;
    } else if (s.n_x_and_orphan == 0) {
      s.log_ratio = -std::numeric_limits<double>::infinity();
    } else {
      s.log_ratio = std::log(s.p_x_given_o / s.p_x);
    }
    scores.push_back(std::move(s));
  }
  return scores;
}

WikiSummary SummarizeWiki(const LinkSnapshot &snapshot) {
  WikiSummary s;
  s.language = snapshot.language();
  s.n_articles = snapshot.num_articles();
  for (uint32_t i = 0; i < snapshot.num_articles(); ++i) {
    if (snapshot.InDegree(i) == 0) ++s.n_orphans;
    if (snapshot.OutDegree(i) == 0) ++s.n_deadends;
  }
  if (s.n_articles > 0) {
    s.orphan_fraction = static_cast<double>(s.n_orphans) / s.n_articles;
    s.deadend_fraction = static_cast<double>(s.n_deadends) / s.n_articles;
  }
  return s;
}

std::vector<WikiSummary> OrphanFractionByWiki(
    std::span<const LinkSnapshot *const> snapshots) {
  std::set<std::string> seen;
  std::vector<WikiSummary> out;
  for (const LinkSnapshot *s : snapshots) {
    if (!seen.insert(s->language()).second) {
      throw std::invalid_argument("two snapshots for language " + s->language());
    }
    out.push_back(SummarizeWiki(*s));
  }
  std::sort(out.begin(), out.end(), [](const WikiSummary &a, const WikiSummary &b) {
    if (a.n_articles != b.n_articles) return a.n_articles > b.n_articles;
    return a.language < b.language;
  });
  return out;
}

}  // namespace oatlas
