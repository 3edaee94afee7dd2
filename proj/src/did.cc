#include "oatlas/did.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include "oatlas/ols.h"
#include "oatlas/tsv.h"

namespace oatlas {
namespace {

constexpr double kZ95 = 1.96;

const ReferrerClass kAllReferrersOnly[] = {ReferrerClass::kAll};

double PreTreatmentMean(const PageviewTable *pageviews, std::string_view language,
                        PageId page, Month treatment, int window) {
  if (pageviews == nullptr || window <= 0) return 0.0;
  double sum = 0.0;
  for (int p = 1; p <= window; ++p) {
    sum += std::log1p(static_cast<double>(
        pageviews->Views(language, page, treatment.Plus(-p), ReferrerClass::kAll)));
  }
  return sum / window;
}

bool EligibleControl(const LanguageSnapshots &lang, PageId page,
                     PairDirection direction) {
  std::optional<uint32_t> before = lang.before->IndexOf(page);
  std::optional<uint32_t> after = lang.after->IndexOf(page);
  if (!before || !after) return false;
  bool orphan_before = lang.before->InDegree(*before) == 0;
  bool orphan_after = lang.after->InDegree(*after) == 0;
  if (direction == PairDirection::kForward) return orphan_before && orphan_after;
  return !orphan_before && !orphan_after;
}

std::string PeriodTerm(int p) { return "period[" + std::to_string(p) + "]"; }

struct Design {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<uint64_t> clusters;
  std::vector<std::string> terms;
};

Design PooledDesign(std::span<const PanelObservation *const> rows) {
  Design d;
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  d.x.resize(n, 4);
  d.y.resize(n);
  d.clusters.reserve(rows.size());
  d.terms = {"intercept", "deorph", "after", "deorph:after"};
  for (Eigen::Index i = 0; i < n; ++i) {
    const PanelObservation &o = *rows[i];
    double treated = o.role == Role::kTreated ? 1.0 : 0.0;
    double after = o.period_index > 0 ? 1.0 : 0.0;
    d.x.row(i) << 1.0, treated, after, treated * after;
    d.y[i] = o.log_views;
    d.clusters.push_back(o.pair_id);
  }
  return d;
}

Design ByMonthDesign(std::span<const PanelObservation *const> rows) {
  std::set<int> period_set;
  for (const PanelObservation *o : rows) period_set.insert(o->period_index);
  if (period_set.count(-1) == 0) {
    throw ModelError("by-month fit needs the reference period -1");
  }
  std::vector<int> periods;
  for (int p : period_set) {
    if (p != -1) periods.push_back(p);
  }
  const Eigen::Index k = 2 + 2 * static_cast<Eigen::Index>(periods.size());
  Design d;
  d.terms = {"intercept", "deorph"};
  for (int p : periods) d.terms.push_back(PeriodTerm(p));
  for (int p : periods) d.terms.push_back("deorph:" + PeriodTerm(p));
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  d.x = Eigen::MatrixXd::Zero(n, k);
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const PanelObservation &o = *rows[i];
    double treated = o.role == Role::kTreated ? 1.0 : 0.0;
    d.x(i, 0) = 1.0;
    d.x(i, 1) = treated;
    auto it = std::find(periods.begin(), periods.end(), o.period_index);
    if (it != periods.end()) {
      Eigen::Index j = it - periods.begin();
      d.x(i, 2 + j) = 1.0;
      d.x(i, 2 + static_cast<Eigen::Index>(periods.size()) + j) = treated;
    }
    d.y[i] = o.log_views;
    d.clusters.push_back(o.pair_id);
  }
  return d;
}

DidEstimate Estimate(std::string group, std::span<const PanelObservation *const> rows,
                     bool by_month) {
  if (rows.empty()) throw DataError("empty panel");
  Design d = by_month ? ByMonthDesign(rows) : PooledDesign(rows);
  OlsFit fit = FitOls(d.x, d.y, d.clusters, d.terms);

  DidEstimate e;
  e.group = std::move(group);
  e.n_observations = fit.n_observations;
  e.n_pairs = fit.n_clusters;
  e.residual_variance = fit.residual_variance;
  for (size_t j = 0; j < fit.terms.size(); ++j) {
    Coefficient c;
    c.term = fit.terms[j];
    c.estimate = fit.coefficients[j];
    c.se_classical = fit.se_classical[j];
    c.se_clustered = fit.se_clustered[j];
    c.t_classical = c.estimate / c.se_classical;
    c.t_stat = c.estimate / c.se_clustered;
    c.p_value = NormalTwoSidedP(c.t_stat);
    c.ci_low = c.estimate - kZ95 * c.se_clustered;
    c.ci_high = c.estimate + kZ95 * c.se_clustered;
    e.coefficients.push_back(std::move(c));
  }
  if (by_month) {
    e.effect = e.effect_percent = std::numeric_limits<double>::quiet_NaN();
  } else {
    e.effect = e.Find("deorph:after")->estimate;
    e.effect_percent = EffectPercent(e.effect);
  }
  return e;
}

}  // namespace

std::string_view DirectionName(PairDirection d) {
  return d == PairDirection::kForward ? "forward" : "reverse";
}

std::optional<PairDirection> ParseDirection(std::string_view name) {
  if (name == "forward") return PairDirection::kForward;
  if (name == "reverse") return PairDirection::kReverse;
  return std::nullopt;
}

std::string_view DidSpecName(DidSpec spec) {
  switch (spec) {
    case DidSpec::kPooled:
      return "pooled";
    case DidSpec::kByLanguage:
      return "by_language";
    case DidSpec::kByMonth:
      return "by_month";
    case DidSpec::kByReferrer:
      return "by_referrer";
  }
  return "pooled";
}

double EffectPercent(double coefficient) { return std::expm1(coefficient); }

const Coefficient *DidEstimate::Find(std::string_view term) const {
  for (const Coefficient &c : coefficients) {
    if (c.term == term) return &c;
  }
  return nullptr;
}

std::vector<PairAssignment> BuildPairs(std::span<const LanguageSnapshots> languages,
                                       PairDirection direction,
                                       const PageviewTable *pageviews,
                                       const PairOptions &options,
                                       PairBuildStats *stats) {
  PairBuildStats local;
  PairBuildStats &counts = stats != nullptr ? *stats : local;

  std::vector<const LanguageSnapshots *> sorted;
  for (const LanguageSnapshots &l : languages) {
    if (l.before == nullptr || l.after == nullptr || l.catalog == nullptr) {
      throw std::invalid_argument("language " + l.language +
                                  " lacks snapshots or catalog");
    }
    if (l.before->month().Next() != l.after->month()) {
      throw DataError("snapshots of " + l.language + " are not consecutive months");
    }
    sorted.push_back(&l);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const auto *a, const auto *b) { return a->language < b->language; });
  for (size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i - 1]->language == sorted[i]->language) {
      throw std::invalid_argument("duplicate language " + sorted[i]->language);
    }
  }

  std::vector<PairAssignment> pairs;
  uint64_t next_id = options.first_pair_id;
  for (const LanguageSnapshots *treated : sorted) {
    const Month month = treated->before->month();
    std::vector<OrphanEvent> events;
    if (direction == PairDirection::kForward) {
      events = DeorphanizingEvents(ComputeLinkDelta(*treated->before, *treated->after),
                                   OrphanSet::Of(*treated->before));
    } else {
      events = OrphanizingEvents(*treated->before, *treated->after);
    }
    for (const OrphanEvent &event : events) {
      ++counts.treated_events;
      std::optional<Qid> qid = treated->catalog->QidOf(event.page_id);
      if (!qid) {
        ++counts.dropped_no_qid;
        continue;
      }
      const double treated_mean = PreTreatmentMean(
          pageviews, treated->language, event.page_id, month, options.window);
      const LanguageSnapshots *best = nullptr;
      PageId best_page = 0;
      double best_distance = 0.0;
      for (const LanguageSnapshots *control : sorted) {
        if (control == treated || control->before->month() != month) continue;
        std::optional<PageId> page = control->catalog->PageOf(*qid);
        if (!page || !EligibleControl(*control, *page, direction)) continue;
        double distance = std::abs(
            PreTreatmentMean(pageviews, control->language, *page, month,
                             options.window) -
            treated_mean);
        // Languages are visited in code order, so strict < keeps the
        // smallest code on ties.
        if (best == nullptr || distance < best_distance) {
          best = control;
          best_page = *page;
          best_distance = distance;
        }
      }
      if (best == nullptr) {
        ++counts.dropped_no_control;
        continue;
      }
      pairs.push_back(PairAssignment{next_id++, *qid, treated->language,
                                     best->language, month, direction,
                                     event.page_id, best_page});
    }
  }
  counts.pairs = pairs.size();
  return pairs;
}

std::vector<PanelObservation> AssemblePanel(std::span<const PairAssignment> pairs,
                                            const PageviewTable &pageviews,
                                            int window,
                                            std::span<const ReferrerClass> referrers) {
  if (window < 1) throw std::invalid_argument("panel window must be >= 1");
  if (referrers.empty()) referrers = kAllReferrersOnly;
  std::vector<PanelObservation> panel;
  panel.reserve(pairs.size() * referrers.size() * 4 * window);
  for (const PairAssignment &pair : pairs) {
    for (ReferrerClass referrer : referrers) {
      for (Role role : {Role::kTreated, Role::kControl}) {
        const std::string &language = role == Role::kTreated
                                          ? pair.treated_language
                                          : pair.control_language;
        PageId page = role == Role::kTreated ? pair.treated_page_id
                                             : pair.control_page_id;
        for (int p = -window; p <= window; ++p) {
          if (p == 0) continue;
          PanelObservation o;
          o.pair_id = pair.pair_id;
          o.direction = pair.direction;
          o.role = role;
          o.treated_language = pair.treated_language;
          o.language = language;
          o.page_id = page;
          o.month = pair.treatment_month.Plus(p);
          o.period_index = p;
          o.referrer = referrer;
          o.views = pageviews.Views(language, page, o.month, referrer);
          o.log_views = std::log1p(static_cast<double>(o.views));
          panel.push_back(std::move(o));
        }
      }
    }
  }
  return panel;
}

DidReport FitDid(std::span<const PanelObservation> panel, DidSpec spec,
                 const DidOptions &options) {
  if (panel.empty()) throw DataError("empty panel");
  DidReport report;
  report.spec = spec;

  std::set<ReferrerClass> referrers;
  for (const PanelObservation &o : panel) referrers.insert(o.referrer);
  if (spec != DidSpec::kByReferrer && referrers.size() > 1) {
    throw DataError("panel mixes referrer classes; fit it by_referrer");
  }

  std::vector<const PanelObservation *> all;
  all.reserve(panel.size());
  for (const PanelObservation &o : panel) all.push_back(&o);

  if (spec == DidSpec::kPooled || spec == DidSpec::kByMonth) {
    report.estimates.push_back(Estimate("all", all, spec == DidSpec::kByMonth));
    return report;
  }

  std::map<std::string, std::vector<const PanelObservation *>> groups;
  if (spec == DidSpec::kByLanguage) {
    for (const PanelObservation *o : all) groups[o->treated_language].push_back(o);
  } else {
    for (ReferrerClass r : {ReferrerClass::kInternal, ReferrerClass::kExternal,
                            ReferrerClass::kUnknown, ReferrerClass::kAll}) {
      groups[std::string(ReferrerName(r))];
    }
    for (const PanelObservation *o : all) {
      groups[std::string(ReferrerName(o->referrer))].push_back(o);
    }
  }
  // Referrer groups are reported in class order, languages alphabetically.
  std::vector<std::string> order;
  if (spec == DidSpec::kByReferrer) {
    for (ReferrerClass r : {ReferrerClass::kInternal, ReferrerClass::kExternal,
                            ReferrerClass::kUnknown, ReferrerClass::kAll}) {
      order.emplace_back(ReferrerName(r));
    }
  } else {
    for (const auto &[name, rows] : groups) order.push_back(name);
  }
  for (const std::string &name : order) {
    const auto &rows = groups[name];
    if (rows.empty()) {
      report.warnings.push_back("group " + name + " is empty");
      continue;
    }
    if (spec == DidSpec::kByLanguage) {
      std::set<uint64_t> ids;
      for (const PanelObservation *o : rows) ids.insert(o->pair_id);
      if (ids.size() < options.min_pairs) {
        report.warnings.push_back("language " + name + " skipped: " +
                                  std::to_string(ids.size()) + " pairs < " +
                                  std::to_string(options.min_pairs));
        continue;
      }
    }
    try {
      report.estimates.push_back(Estimate(name, rows, false));
    } catch (const Error &e) {
      report.warnings.push_back("group " + name + " skipped: " + e.what());
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// files

void WritePairsTsv(std::ostream &out, std::span<const PairAssignment> pairs) {
  out << "pair_id\tqid\ttreated_language\tcontrol_language\ttreatment_month\t"
         "direction\ttreated_page_id\tcontrol_page_id\n";
  for (const PairAssignment &p : pairs) {
    out << p.pair_id << '\t' << p.qid.ToString() << '\t' << p.treated_language
        << '\t' << p.control_language << '\t' << p.treatment_month.ToString()
        << '\t' << DirectionName(p.direction) << '\t' << p.treated_page_id
        << '\t' << p.control_page_id << '\n';
  }
}

std::vector<PairAssignment> ReadPairsTsv(std::istream &in) {
  std::vector<PairAssignment> pairs;
  TsvReader reader(in);
  std::vector<std::string_view> f;
  while (reader.Next(f)) {
    if (f[0] == "pair_id") continue;
    auto bad = [&] {
      return DataError("pairs line " + std::to_string(reader.line_number()) +
                       " is malformed");
    };
    if (f.size() != 8) throw bad();
    std::optional<uint64_t> id = ParseUnsigned(f[0]);
    std::optional<Qid> qid = Qid::Parse(f[1]);
    std::optional<Month> month = Month::Parse(f[4]);
    std::optional<PairDirection> direction = ParseDirection(f[5]);
    std::optional<uint64_t> treated = ParseUnsigned(f[6]);
    std::optional<uint64_t> control = ParseUnsigned(f[7]);
    if (!id || !qid || !month || !direction || !treated || !control) throw bad();
    pairs.push_back(PairAssignment{*id, *qid, std::string(f[2]), std::string(f[3]),
                                   *month, *direction, *treated, *control});
  }
  return pairs;
}

void WritePanelTsv(std::ostream &out, std::span<const PanelObservation> panel) {
  out << "pair_id\tdirection\trole\ttreated_language\tlanguage\tpage_id\tmonth\t"
         "period_index\treferrer_class\tviews\tlog_views\n";
  for (const PanelObservation &o : panel) {
    out << o.pair_id << '\t' << DirectionName(o.direction) << '\t'
        << (o.role == Role::kTreated ? "treated" : "control") << '\t'
        << o.treated_language << '\t' << o.language << '\t' << o.page_id << '\t'
        << o.month.ToString() << '\t' << o.period_index << '\t'
        << ReferrerName(o.referrer) << '\t' << o.views << '\t'
        << FormatDouble(o.log_views) << '\n';
  }
}

std::vector<PanelObservation> ReadPanelTsv(std::istream &in) {
  std::vector<PanelObservation> panel;
  TsvReader reader(in);
  std::vector<std::string_view> f;
  while (reader.Next(f)) {
    if (f[0] == "pair_id") continue;
    auto bad = [&] {
      return DataError("panel line " + std::to_string(reader.line_number()) +
                       " is malformed");
    };
    if (f.size() != 11) throw bad();
    PanelObservation o;
    std::optional<uint64_t> id = ParseUnsigned(f[0]);
    std::optional<PairDirection> direction = ParseDirection(f[1]);
    std::optional<uint64_t> page = ParseUnsigned(f[5]);
    std::optional<Month> month = Month::Parse(f[6]);
    std::optional<int64_t> period = ParseInt(f[7]);
    std::optional<ReferrerClass> referrer = ParseReferrer(f[8]);
    std::optional<uint64_t> views = ParseUnsigned(f[9]);
    std::optional<double> log_views = ParseDouble(f[10]);
    if (!id || !direction || (f[2] != "treated" && f[2] != "control") || !page ||
        !month || !period || *period == 0 || !referrer || !views || !log_views ||
        *log_views < 0.0) {
      throw bad();
    }
    o.pair_id = *id;
    o.direction = *direction;
    o.role = f[2] == "treated" ? Role::kTreated : Role::kControl;
    o.treated_language = std::string(f[3]);
    o.language = std::string(f[4]);
    o.page_id = *page;
    o.month = *month;
    o.period_index = static_cast<int>(*period);
    o.referrer = *referrer;
    o.views = *views;
    o.log_views = *log_views;
    panel.push_back(std::move(o));
  }
  return panel;
}

nlohmann::ordered_json DidReportToJson(const DidReport &report) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["spec"] = DidSpecName(report.spec);
  ordered_json estimates = ordered_json::array();
  for (const DidEstimate &e : report.estimates) {
    ordered_json je;
    je["group"] = e.group;
    je["n_observations"] = e.n_observations;
    je["n_pairs"] = e.n_pairs;
    je["residual_variance"] = e.residual_variance;
    je["effect"] = e.effect;
    je["effect_percent"] = e.effect_percent;
    ordered_json coefficients = ordered_json::array();
    for (const Coefficient &c : e.coefficients) {
      coefficients.push_back({{"term", c.term},
                              {"estimate", c.estimate},
                              {"se_classical", c.se_classical},
                              {"se_clustered", c.se_clustered},
                              {"t_classical", c.t_classical},
                              {"t", c.t_stat},
                              {"p_value", c.p_value},
                              {"ci_low", c.ci_low},
                              {"ci_high", c.ci_high}});
    }
    je["coefficients"] = std::move(coefficients);
    estimates.push_back(std::move(je));
  }
  j["estimates"] = std::move(estimates);
  j["warnings"] = report.warnings;
  return j;
}

}  // namespace oatlas
