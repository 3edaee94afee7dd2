#ifndef OATLAS_DID_H_
#define OATLAS_DID_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "oatlas/catalog.h"
#include "oatlas/graph.h"
#include "oatlas/ingest.h"
#include "oatlas/month.h"

namespace oatlas {

// forward: orphan -> de-orphanized (treated) vs. orphan -> orphan (control).
// reverse: linked -> orphanized (treated) vs. linked -> linked (control).
enum class PairDirection {
  kForward,
  kReverse,
};

std::string_view DirectionName(PairDirection d);
std::optional<PairDirection> ParseDirection(std::string_view name);

enum class Role {
  kTreated,
  kControl,
};

// The same Wikidata item in two languages; it changes orphan status in the
// treated language during the treatment month and keeps it in the control
// language.
struct PairAssignment {
  uint64_t pair_id = 0;
  Qid qid;
  std::string treated_language;
  std::string control_language;
  Month treatment_month;
  PairDirection direction = PairDirection::kForward;
  PageId treated_page_id = 0;
  PageId control_page_id = 0;

  friend bool operator==(const PairAssignment &, const PairAssignment &) = default;
};

// One language's snapshots at the start of the treatment month (`before`)
// and of the following month (`after`).
struct LanguageSnapshots {
  std::string language;
  const LinkSnapshot *before = nullptr;
  const LinkSnapshot *after = nullptr;
  const ArticleCatalog *catalog = nullptr;
};

struct PairBuildStats {
  uint64_t treated_events = 0;
  uint64_t dropped_no_qid = 0;
  uint64_t dropped_no_control = 0;
  uint64_t pairs = 0;
};

struct PairOptions {
  // Months on each side of the treatment month.
  int window = 3;
  uint64_t first_pair_id = 1;
};

// Treated articles are the de-orphanizing (forward) or orphanizing (reverse)
// events of each language. Eligible controls are the same item in another
// language, present in both snapshots and orphan (forward) or linked
// (reverse) in both. Among several eligible controls the one whose
// pre-treatment mean ln(1 + views) is closest to the treated article's wins;
// ties go to the smaller language code. `pageviews` may be null, in which
// case every control ties.
//
// Pairs come out ordered by (treated language, treated page id) with
// consecutive ids.
std::vector<PairAssignment> BuildPairs(std::span<const LanguageSnapshots> languages,
                                       PairDirection direction,
                                       const PageviewTable *pageviews,
                                       const PairOptions &options = {},
                                       PairBuildStats *stats = nullptr);

struct PanelObservation {
  uint64_t pair_id = 0;
  PairDirection direction = PairDirection::kForward;
  Role role = Role::kTreated;
  std::string treated_language;  // grouping key for per-language fits
  std::string language;
  PageId page_id = 0;
  Month month;
  // Months relative to the treatment month; never 0.
  int period_index = 0;
  ReferrerClass referrer = ReferrerClass::kAll;
  uint64_t views = 0;
  double log_views = 0.0;  // ln(1 + views)
};

// 2 roles x 2*window months per pair and referrer class, with missing
// pageview rows imputed as zero. Ordered by (pair, referrer, role, period).
std::vector<PanelObservation> AssemblePanel(
    std::span<const PairAssignment> pairs, const PageviewTable &pageviews,
    int window = 3,
    std::span<const ReferrerClass> referrers = std::span<const ReferrerClass>());

enum class DidSpec {
  kPooled,
  kByLanguage,
  kByMonth,
  kByReferrer,
};

std::string_view DidSpecName(DidSpec spec);

struct DidOptions {
  // Per-language fits need at least this many pairs.
  size_t min_pairs = 30;
};

// t, p and the 95% interval use the pair-clustered standard error, with the
// normal approximation.
struct Coefficient {
  std::string term;
  double estimate = 0.0;
  double se_classical = 0.0;
  double se_clustered = 0.0;
  double t_classical = 0.0;
  double t_stat = 0.0;
  double p_value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct DidEstimate {
  std::string group;  // "all", a language code, or a referrer class
  std::vector<Coefficient> coefficients;
  size_t n_observations = 0;
  size_t n_pairs = 0;
  double residual_variance = 0.0;
  // The deorph:after coefficient and exp(it) - 1; NaN for by-month fits.
  double effect = 0.0;
  double effect_percent = 0.0;

  const Coefficient *Find(std::string_view term) const;
};

struct DidReport {
  DidSpec spec = DidSpec::kPooled;
  std::vector<DidEstimate> estimates;
  std::vector<std::string> warnings;
};

// Fits Y = b0 + b1 deorph + b2 after + b3 deorph*after (+ extensions) by
// least squares:
//   pooled       one fit, terms intercept, deorph, after, deorph:after
//   by_language  the pooled model per treated language with >= min_pairs
//   by_month     after replaced by period dummies, reference period -1:
//                terms period[p] and deorph:period[p]
//   by_referrer  the pooled model per referrer class
// Non-referrer specs reject panels that mix referrer classes. Throws
// DataError on an empty panel and ModelError on a rank-deficient design; in
// grouped fits a failing group is skipped with a warning instead.
DidReport FitDid(std::span<const PanelObservation> panel, DidSpec spec,
                 const DidOptions &options = {});

// exp(b) - 1: a log-point coefficient as a relative change.
double EffectPercent(double coefficient);

// ---------------------------------------------------------------------------
// files

void WritePairsTsv(std::ostream &out, std::span<const PairAssignment> pairs);
std::vector<PairAssignment> ReadPairsTsv(std::istream &in);

void WritePanelTsv(std::ostream &out, std::span<const PanelObservation> panel);
std::vector<PanelObservation> ReadPanelTsv(std::istream &in);

nlohmann::ordered_json DidReportToJson(const DidReport &report);

}  // namespace oatlas

#endif  // OATLAS_DID_H_
