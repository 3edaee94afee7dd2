#include "oatlas/pipeline.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <set>

#include <json.hpp>

#include "oatlas/catalog.h"
#include "oatlas/characterize.h"
#include "oatlas/deorph.h"
#include "oatlas/did.h"
#include "oatlas/graph.h"
#include "oatlas/ingest.h"
#include "oatlas/lowess.h"
#include "oatlas/parallel.h"
#include "oatlas/snapshot_io.h"
#include "oatlas/sql_dump.h"
#include "oatlas/tsv.h"

namespace oatlas {

namespace fs = std::filesystem;

std::string_view StageName(Stage stage) {
  switch (stage) {
    case Stage::kIngest: return "ingest";
    case Stage::kOrphans: return "orphans";
    case Stage::kCharacterize: return "characterize";
    case Stage::kPanel: return "panel";
    case Stage::kDid: return "did";
    case Stage::kCandidates: return "candidates";
    case Stage::kAll: return "all";
  }
  return "?";
}

namespace {

std::ofstream OpenOutput(const fs::path &path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void CloseOutput(std::ofstream &out, const fs::path &path) {
  out.close();
  if (!out) throw std::runtime_error("error writing " + path.string());
}

fs::path SnapshotPath(const RunConfig &config, std::string_view lang, Month m) {
  return config.out / "snapshots" / std::string(lang) / (m.ToString() + ".oatl");
}

fs::path CatalogPath(const RunConfig &config, std::string_view lang, Month m) {
  return config.out / "snapshots" / std::string(lang) /
         (m.ToString() + ".catalog.tsv");
}

// ---------------------------------------------------------------------------
// ingest

struct IngestJob {
  std::string language;
  Month month;
  fs::path dir;
};

struct ManifestRow {
  std::string language;
  std::string month;  // empty for a missing language
  std::string status;
  uint64_t n_pages = 0;
  uint64_t n_articles = 0;
  uint64_t n_redirects = 0;
  uint64_t n_edges = 0;
  uint64_t raw_links = 0;
  uint64_t skipped_rows = 0;
  uint64_t dropped_missing_target = 0;
  uint64_t dropped_redirect_cycle = 0;
  std::string note;
};

void WriteManifest(const fs::path &path, std::span<const ManifestRow> rows) {
  auto out = OpenOutput(path);
  out << "language\tmonth\tstatus\tn_pages\tn_articles\tn_redirects\tn_edges"
         "\traw_links\tskipped_rows\tdropped_missing_target"
         "\tdropped_redirect_cycle\tnote\n";
  for (const ManifestRow &r : rows) {
    out << r.language << '\t' << r.month << '\t' << r.status << '\t' << r.n_pages
        << '\t' << r.n_articles << '\t' << r.n_redirects << '\t' << r.n_edges << '\t'
        << r.raw_links << '\t' << r.skipped_rows << '\t' << r.dropped_missing_target
        << '\t' << r.dropped_redirect_cycle << '\t' << TsvEscape(r.note) << '\n';
  }
  CloseOutput(out, path);
}

std::vector<std::string> ListDirectories(const fs::path &dir) {
  std::vector<std::string> names;
  for (const auto &entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) names.push_back(entry.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::ifstream OpenDump(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing file " + path.string());
  return in;
}

// Notes go into the manifest row; the caller logs them in job order.
ManifestRow IngestOne(const RunConfig &config, const IngestJob &job,
                      const QidIndex &qids) {
  ManifestRow row;
  row.language = job.language;
  row.month = job.month.ToString();
  const ParseMode mode = config.parse_mode;
  for (const char *name : {"page.sql", "redirect.sql", "pagelinks.sql"}) {
    if (!fs::exists(job.dir / name)) {
      if (mode == ParseMode::kStrict) {
        throw DataError("missing file " + (job.dir / name).string());
      }
      row.status = "skipped";
      row.note = std::string("missing ") + name;
      return row;
    }
  }

  auto page_in = OpenDump(job.dir / "page.sql");
  SqlRowReader page_reader(page_in, mode);
  PageTable pages = LoadPageTable(page_reader, mode);
  row.skipped_rows += page_reader.stats().skipped_rows + pages.stats().bad_rows;

  auto redirect_in = OpenDump(job.dir / "redirect.sql");
  SqlRowReader redirect_reader(redirect_in, mode);
  RedirectMap redirects = LoadRedirects(redirect_reader, pages, mode);
  row.skipped_rows += redirect_reader.stats().skipped_rows + redirects.stats.bad_rows;

  auto links_in = OpenDump(job.dir / "pagelinks.sql");
  SqlRowReader link_reader(links_in, mode);
  SnapshotBuilder builder(job.language, job.month, pages, redirects, mode);
  SqlRow sql_row;
  while (link_reader.Next(sql_row)) builder.AddRow(sql_row);
  LinkSnapshot snapshot = builder.Finish();
  const SnapshotBuildStats &stats = builder.stats();
  row.skipped_rows += link_reader.stats().skipped_rows + stats.bad_rows;

  ArticleCatalog catalog = ArticleCatalog::Build(job.language, pages, qids);
  const fs::path snapshot_path = SnapshotPath(config, job.language, job.month);
  fs::create_directories(snapshot_path.parent_path());
  SaveSnapshot(snapshot_path, snapshot);
  const fs::path catalog_path = CatalogPath(config, job.language, job.month);
  auto catalog_out = OpenOutput(catalog_path);
  WriteCatalogTsv(catalog_out, catalog);
  CloseOutput(catalog_out, catalog_path);

  row.status = "ok";
  row.n_pages = pages.size();
  for (const auto &[id, record] : pages.records()) row.n_redirects += record.is_redirect;
  row.n_articles = snapshot.num_articles();
  row.n_edges = snapshot.num_edges();
  row.raw_links = stats.raw_links;
  row.dropped_missing_target = stats.dropped_missing_target;
  row.dropped_redirect_cycle = stats.dropped_redirect_cycle;
  if (row.skipped_rows > 0) {
    row.note = "skipped " + std::to_string(row.skipped_rows) + " malformed rows";
  }
  return row;
}

// ---------------------------------------------------------------------------
// loading ingested snapshots

struct ManifestEntry {
  std::string language;
  Month month;
};

std::vector<ManifestEntry> ReadManifest(const RunConfig &config) {
  const fs::path path = config.out / "manifest.tsv";
  std::ifstream in(path);
  if (!in) throw DataError("no manifest at " + path.string() + "; run ingest first");
  TsvReader reader(in);
  std::vector<std::string_view> f;
  std::vector<ManifestEntry> entries;
  while (reader.Next(f)) {
    if (f[0] == "language") continue;
    if (f.size() < 3) throw DataError("malformed manifest line");
    if (f[2] != "ok") continue;
    const auto month = Month::Parse(f[1]);
    if (!month) throw DataError("malformed month in manifest");
    if (!config.WantsLanguage(f[0]) || !config.WantsMonth(*month)) continue;
    entries.push_back({std::string(f[0]), *month});
  }
  std::sort(entries.begin(), entries.end(), [](const auto &a, const auto &b) {
    return std::tie(a.language, a.month) < std::tie(b.language, b.month);
  });
  return entries;
}

struct Wiki {
  std::string language;
  Month month;
  LinkSnapshot snapshot;
  ArticleCatalog catalog;
};

// Sorted by (language, month).
std::vector<Wiki> LoadWikis(const RunConfig &config,
                            std::span<const ManifestEntry> entries) {
  std::vector<Wiki> wikis(entries.size());
  ParallelFor(entries.size(), config.WorkerCount(), [&](size_t i) {
    const ManifestEntry &e = entries[i];
    Wiki &w = wikis[i];
    w.language = e.language;
    w.month = e.month;
    w.snapshot = LoadSnapshot(SnapshotPath(config, e.language, e.month));
    std::ifstream in(CatalogPath(config, e.language, e.month));
    if (!in) throw DataError("missing catalog for " + e.language + " " +
                             e.month.ToString());
    w.catalog = ReadCatalogTsv(in, e.language);
  });
  return wikis;
}

std::optional<Month> ReportMonth(std::span<const ManifestEntry> entries) {
  std::optional<Month> latest;
  for (const auto &e : entries) {
    if (!latest || *latest < e.month) latest = e.month;
  }
  return latest;
}

std::vector<ManifestEntry> EntriesAt(std::span<const ManifestEntry> entries,
                                     std::optional<Month> month) {
  std::vector<ManifestEntry> out;
  for (const auto &e : entries) {
    if (month && e.month == *month) out.push_back(e);
  }
  return out;
}

void NoteMissingLanguages(std::span<const ManifestEntry> all,
                          std::span<const ManifestEntry> at, Month month,
                          std::ostream &log) {
  std::set<std::string> present;
  for (const auto &e : at) present.insert(e.language);
  std::set<std::string> noted;
  for (const auto &e : all) {
    if (!present.count(e.language) && noted.insert(e.language).second) {
      log << "oatlas: " << e.language << " has no snapshot for " << month.ToString()
          << "; left out of the reports\n";
    }
  }
}

// Optional auxiliary table under the data root: missing is an error only in
// strict mode.
std::unique_ptr<std::ifstream> OpenAuxiliary(const RunConfig &config,
                                             const char *name, std::ostream &log) {
  const fs::path path = config.data_root / name;
  auto in = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (*in) return in;
  if (config.parse_mode == ParseMode::kStrict) {
    throw DataError("missing file " + path.string());
  }
  log << "oatlas: " << path.string() << " not found; treating it as empty\n";
  return nullptr;
}

void LogIssues(const RowIssues &issues, const char *what, std::ostream &log) {
  if (issues.count() == 0) return;
  log << "oatlas: " << what << ": skipped " << issues.count() << " rows";
  if (!issues.samples().empty()) log << " (first: " << issues.samples().front() << ')';
  log << '\n';
}

std::string FormatRate(std::optional<double> rate) {
  return rate ? FormatDouble(*rate) : "NA";
}

}  // namespace

// ---------------------------------------------------------------------------

void RunIngest(const RunConfig &config, std::ostream &log) {
  if (!fs::is_directory(config.data_root)) {
    throw DataError("data root " + config.data_root.string() + " is not a directory");
  }
  std::vector<ManifestRow> manifest;
  std::vector<IngestJob> jobs;
  std::vector<std::string> languages;
  if (config.all_languages) {
    languages = ListDirectories(config.data_root);
  } else {
    for (const std::string &lang : config.languages) {
      if (fs::is_directory(config.data_root / lang)) {
        languages.push_back(lang);
      } else if (config.parse_mode == ParseMode::kStrict) {
        throw DataError("no directory for language " + lang);
      } else {
        ManifestRow row;
        row.language = lang;
        row.status = "skipped";
        row.note = "no language directory";
        manifest.push_back(row);
      }
    }
  }
  for (const std::string &lang : languages) {
    for (const std::string &name : ListDirectories(config.data_root / lang)) {
      const auto month = Month::Parse(name);
      if (!month || !config.WantsMonth(*month)) continue;
      jobs.push_back({lang, *month, config.data_root / lang / name});
    }
  }

  QidIndex qids;
  if (!jobs.empty()) {
    if (auto in = OpenAuxiliary(config, "sitelinks.tsv", log)) {
      qids = LoadSitelinks(*in, config.parse_mode);
    }
  }

  std::vector<ManifestRow> rows(jobs.size());
  ParallelFor(jobs.size(), config.WorkerCount(), [&](size_t i) {
    rows[i] = IngestOne(config, jobs[i], qids);
  });
  for (const ManifestRow &r : rows) {
    if (!r.note.empty()) {
      log << "oatlas: " << r.language << ' ' << r.month << ": " << r.note << '\n';
    }
  }
  manifest.insert(manifest.end(), rows.begin(), rows.end());
  std::sort(manifest.begin(), manifest.end(), [](const auto &a, const auto &b) {
    return std::tie(a.language, a.month) < std::tie(b.language, b.month);
  });
  WriteManifest(config.out / "manifest.tsv", manifest);
  log << "oatlas: ingested " << rows.size() << " snapshots\n";
}

void RunOrphans(const RunConfig &config, std::ostream &log) {
  const auto entries = ReadManifest(config);
  std::vector<Wiki> wikis = LoadWikis(config, entries);
  const std::optional<Month> report_month = ReportMonth(entries);

  // Summary for the report month.
  std::vector<const LinkSnapshot *> latest;
  for (const Wiki &w : wikis) {
    if (w.month == report_month) latest.push_back(&w.snapshot);
  }
  if (report_month) NoteMissingLanguages(entries, EntriesAt(entries, report_month),
                                         *report_month, log);
  const std::vector<WikiSummary> summary = OrphanFractionByWiki(latest);
  {
    const fs::path path = config.out / "wiki_summary.tsv";
    auto out = OpenOutput(path);
    out << "language\tmonth\tn_articles\tn_orphans\tn_deadends\torphan_fraction"
           "\tdeadend_fraction\n";
    for (const WikiSummary &s : summary) {
      out << s.language << '\t' << report_month->ToString() << '\t' << s.n_articles
          << '\t' << s.n_orphans << '\t' << s.n_deadends << '\t'
          << FormatDouble(s.orphan_fraction) << '\t'
          << FormatDouble(s.deadend_fraction) << '\n';
    }
    CloseOutput(out, path);
  }
  {
    uint64_t articles = 0, orphans = 0, deadends = 0;
    for (const WikiSummary &s : summary) {
      articles += s.n_articles;
      orphans += s.n_orphans;
      deadends += s.n_deadends;
    }
    const fs::path path = config.out / "orphan_totals.tsv";
    auto out = OpenOutput(path);
    out << "n_wikis\tn_articles\tn_orphans\tn_deadends\torphan_fraction"
           "\tdeadend_fraction\n";
    const double n = static_cast<double>(articles);
    out << summary.size() << '\t' << articles << '\t' << orphans << '\t' << deadends
        << '\t' << FormatDouble(articles ? orphans / n : 0.0) << '\t'
        << FormatDouble(articles ? deadends / n : 0.0) << '\n';
    CloseOutput(out, path);
  }
  {
    std::vector<double> x, y;
    std::vector<const WikiSummary *> fitted;
    for (const WikiSummary &s : summary) {
      if (s.n_articles == 0) continue;
      x.push_back(std::log10(static_cast<double>(s.n_articles)));
      y.push_back(s.orphan_fraction);
      fitted.push_back(&s);
    }
    const fs::path path = config.out / "lowess_curve.tsv";
    auto out = OpenOutput(path);
    out << "language\tlog10_n_articles\torphan_fraction\tfitted\n";
    if (x.size() >= 3) {
      const auto yhat = Lowess(x, y, {config.lowess_bandwidth, 2});
      for (size_t i = 0; i < x.size(); ++i) {
        out << fitted[i]->language << '\t' << FormatDouble(x[i]) << '\t'
            << FormatDouble(y[i]) << '\t' << FormatDouble(yhat[i]) << '\n';
      }
    } else {
      log << "oatlas: fewer than 3 wikis; lowess_curve.tsv left empty\n";
    }
    CloseOutput(out, path);
  }
  {
    const fs::path path = config.out / "orphans.tsv";
    auto out = OpenOutput(path);
    out << "language\tmonth\tpage_id\ttitle\n";
    for (const Wiki &w : wikis) {
      if (w.month != report_month) continue;
      for (PageId p : Orphans(w.snapshot)) {
        out << w.language << '\t' << w.month.ToString() << '\t' << p << '\t'
            << TsvEscape(w.catalog.TitleOf(p)) << '\n';
      }
    }
    CloseOutput(out, path);
  }

  // Month-over-month de-orphanization.
  std::vector<std::pair<size_t, size_t>> steps;
  for (size_t i = 0; i + 1 < wikis.size(); ++i) {
    if (wikis[i].language == wikis[i + 1].language &&
        wikis[i + 1].month == wikis[i].month.Next()) {
      steps.emplace_back(i, i + 1);
    }
  }
  struct Step {
    size_t n_orphans = 0;
    std::optional<double> rate;
    std::vector<OrphanEvent> events;
  };
  std::vector<Step> results(steps.size());
  ParallelFor(steps.size(), config.WorkerCount(), [&](size_t i) {
    const LinkSnapshot &before = wikis[steps[i].first].snapshot;
    const LinkSnapshot &after = wikis[steps[i].second].snapshot;
    const OrphanSet orphans = OrphanSet::Of(before);
    results[i].n_orphans = orphans.pages.size();
    results[i].events = DeorphanizingEvents(ComputeLinkDelta(before, after), orphans);
    results[i].rate = DeorphanizationRate(orphans, results[i].events);
  });
  {
    const fs::path path = config.out / "deorph_rates.tsv";
    auto out = OpenOutput(path);
    out << "language\tfrom_month\tto_month\tn_orphans\tn_deorphanized\trate\n";
    for (size_t i = 0; i < steps.size(); ++i) {
      const Wiki &w = wikis[steps[i].first];
      out << w.language << '\t' << w.month.ToString() << '\t'
          << w.month.Next().ToString() << '\t' << results[i].n_orphans << '\t'
          << results[i].events.size() << '\t' << FormatRate(results[i].rate) << '\n';
    }
    CloseOutput(out, path);
  }
  {
    const fs::path path = config.out / "added_indegree_cdf.tsv";
    auto out = OpenOutput(path);
    out << "language\tk\tcumulative_probability\n";
    std::map<std::string, std::vector<OrphanEvent>> by_language;
    std::vector<OrphanEvent> pooled;
    for (size_t i = 0; i < steps.size(); ++i) {
      auto &events = by_language[wikis[steps[i].first].language];
      events.insert(events.end(), results[i].events.begin(), results[i].events.end());
      pooled.insert(pooled.end(), results[i].events.begin(), results[i].events.end());
    }
    by_language.emplace("ALL", std::move(pooled));
    for (const auto &[lang, events] : by_language) {
      for (const auto &[k, p] : AddedIndegreeCdf(events)) {
        out << lang << '\t' << k << '\t' << FormatDouble(p) << '\n';
      }
    }
    CloseOutput(out, path);
  }
  log << "oatlas: orphans: " << summary.size() << " wikis, " << steps.size()
      << " month steps\n";
}

void RunCharacterize(const RunConfig &config, std::ostream &log) {
  const auto all_entries = ReadManifest(config);
  const auto report_month = ReportMonth(all_entries);
  const auto entries = EntriesAt(all_entries, report_month);
  if (report_month) NoteMissingLanguages(all_entries, entries, *report_month, log);
  std::vector<Wiki> wikis = LoadWikis(config, entries);

  std::vector<FeatureRecord> records;
  if (auto in = OpenAuxiliary(config, "features.tsv", log)) {
    RowIssues issues(config.parse_mode);
    records = LoadFeatures(*in, config.parse_mode, &issues);
    LogIssues(issues, "features.tsv", log);
  }
  std::vector<std::vector<RepresentationScore>> scores(wikis.size());
  ParallelFor(wikis.size(), config.WorkerCount(), [&](size_t i) {
    const Wiki &w = wikis[i];
    const FeatureTable table = BuildFeatureTable(w.language, records, &w.snapshot);
    if (table.rows.empty()) return;
    scores[i] = RepresentationScores(Orphans(w.snapshot), table);
  });

  const fs::path path = config.out / "representation_scores.tsv";
  auto out = OpenOutput(path);
  out << "language\tfeature\tp_x_given_o\tp_x\tlog_ratio\tn_orphans\tn_rows\n";
  for (const auto &per_wiki : scores) {
    for (const RepresentationScore &s : per_wiki) {
      out << s.language << '\t' << FeatureName(s.feature) << '\t'
          << FormatDouble(s.p_x_given_o) << '\t' << FormatDouble(s.p_x) << '\t'
          << FormatDouble(s.log_ratio) << '\t' << s.n_orphans << '\t' << s.n_rows
          << '\n';
    }
  }
  CloseOutput(out, path);
  log << "oatlas: characterize: " << records.size() << " feature rows\n";
}

void RunPanel(const RunConfig &config, std::ostream &log) {
  const auto entries = ReadManifest(config);
  std::vector<Wiki> wikis = LoadWikis(config, entries);

  PageviewTable pageviews;
  if (auto in = OpenAuxiliary(config, "pageviews.tsv", log)) {
    RowIssues issues(config.parse_mode);
    pageviews = LoadPageviews(*in, config.parse_mode, &issues);
    LogIssues(issues, "pageviews.tsv", log);
  }

  std::map<std::pair<std::string, Month>, const Wiki *> index;
  std::set<Month> treatment_months;
  for (const Wiki &w : wikis) index[{w.language, w.month}] = &w;
  for (const Wiki &w : wikis) {
    if (index.count({w.language, w.month.Next()}) &&
        (!config.treatment_month || *config.treatment_month == w.month)) {
      treatment_months.insert(w.month);
    }
  }

  std::vector<PairAssignment> pairs;
  for (PairDirection direction : {PairDirection::kForward, PairDirection::kReverse}) {
    PairBuildStats total;
    for (Month m : treatment_months) {
      std::vector<LanguageSnapshots> languages;
      for (const Wiki &w : wikis) {
        if (w.month != m) continue;
        const Wiki *after = index.at({w.language, m.Next()});
        languages.push_back({w.language, &w.snapshot, &after->snapshot, &w.catalog});
      }
      PairOptions options;
      options.window = config.window;
      options.first_pair_id = pairs.size() + 1;
      PairBuildStats stats;
      auto built = BuildPairs(languages, direction, &pageviews, options, &stats);
      pairs.insert(pairs.end(), built.begin(), built.end());
      total.treated_events += stats.treated_events;
      total.dropped_no_qid += stats.dropped_no_qid;
      total.dropped_no_control += stats.dropped_no_control;
      total.pairs += stats.pairs;
    }
    log << "oatlas: panel: " << DirectionName(direction) << ": "
        << total.treated_events << " treated events, " << total.pairs << " pairs, "
        << total.dropped_no_qid << " without item, " << total.dropped_no_control
        << " without control\n";
  }

  const ReferrerClass referrers[] = {ReferrerClass::kAll, ReferrerClass::kInternal,
                                     ReferrerClass::kExternal,
                                     ReferrerClass::kUnknown};
  const auto panel = AssemblePanel(pairs, pageviews, config.window, referrers);

  const fs::path pairs_path = config.out / "pairs.tsv";
  auto pairs_out = OpenOutput(pairs_path);
  WritePairsTsv(pairs_out, pairs);
  CloseOutput(pairs_out, pairs_path);
  const fs::path panel_path = config.out / "panel.tsv";
  auto panel_out = OpenOutput(panel_path);
  WritePanelTsv(panel_out, panel);
  CloseOutput(panel_out, panel_path);
}

void RunDid(const RunConfig &config, std::ostream &log) {
  const fs::path panel_path = config.out / "panel.tsv";
  std::ifstream in(panel_path);
  if (!in) throw DataError("no panel at " + panel_path.string() + "; run panel first");
  const std::vector<PanelObservation> panel = ReadPanelTsv(in);

  nlohmann::ordered_json doc;
  doc["window"] = config.window;
  doc["min_pairs"] = config.min_pairs;
  doc["directions"] = nlohmann::ordered_json::array();
  DidOptions options;
  options.min_pairs = config.min_pairs;
  size_t total_pairs = 0;
  for (PairDirection direction : {PairDirection::kForward, PairDirection::kReverse}) {
    std::vector<PanelObservation> all_referrers, overall;
    std::set<uint64_t> pair_ids;
    for (const PanelObservation &o : panel) {
      if (o.direction != direction) continue;
      all_referrers.push_back(o);
      if (o.referrer == ReferrerClass::kAll) overall.push_back(o);
      pair_ids.insert(o.pair_id);
    }
    total_pairs += pair_ids.size();
    nlohmann::ordered_json jd;
    jd["direction"] = DirectionName(direction);
    jd["n_pairs"] = pair_ids.size();
    jd["reports"] = nlohmann::ordered_json::array();
    if (pair_ids.empty()) {
      jd["explanation"] = "no " + std::string(DirectionName(direction)) +
                          " treated-control pairs in the panel";
    } else {
      for (DidSpec spec : {DidSpec::kPooled, DidSpec::kByLanguage, DidSpec::kByMonth}) {
        jd["reports"].push_back(DidReportToJson(FitDid(overall, spec, options)));
      }
      jd["reports"].push_back(
          DidReportToJson(FitDid(all_referrers, DidSpec::kByReferrer, options)));
    }
    doc["directions"].push_back(std::move(jd));
  }
  if (total_pairs == 0) {
    doc["explanation"] =
        "no treated-control pairs: no article changed orphan status in one "
        "language while an eligible counterpart kept its status in another";
  }
  const fs::path path = config.out / "estimates.json";
  auto out = OpenOutput(path);
  out << doc.dump(2) << '\n';
  CloseOutput(out, path);
  if (total_pairs == 0) throw DataError("no treated-control pairs to fit");
  log << "oatlas: did: fitted " << total_pairs << " pairs\n";
}

void RunCandidates(const RunConfig &config, std::ostream &log) {
  const auto all_entries = ReadManifest(config);
  const auto report_month = ReportMonth(all_entries);
  const auto entries = EntriesAt(all_entries, report_month);
  if (report_month) NoteMissingLanguages(all_entries, entries, *report_month, log);
  std::vector<Wiki> wikis = LoadWikis(config, entries);

  std::vector<std::unique_ptr<InLinkIndex>> inlinks(wikis.size());
  ParallelFor(wikis.size(), config.WorkerCount(), [&](size_t i) {
    inlinks[i] = std::make_unique<InLinkIndex>(wikis[i].snapshot);
  });
  std::vector<LanguageGraph> graphs;
  for (size_t i = 0; i < wikis.size(); ++i) {
    graphs.push_back({wikis[i].language, &wikis[i].snapshot, &wikis[i].catalog,
                      inlinks[i].get()});
  }

  FindlinkOptions findlink_options;
  findlink_options.case_insensitive = config.findlink_case_insensitive;
  struct Result {
    std::vector<CandidateLink> candidates;
    CoverageReport coverage;
    uint64_t invalid = 0;
  };
  std::vector<Result> results(wikis.size());
  ParallelFor(wikis.size(), config.WorkerCount(), [&](size_t i) {
    const Wiki &w = wikis[i];
    std::vector<AnnotatedDocument> corpus;
    const fs::path corpus_path =
        config.data_root / w.language / w.month.ToString() / "documents.jsonl";
    if (std::ifstream in(corpus_path); in) corpus = ReadCorpusJsonl(in, w.language);

    std::map<PageId, std::vector<CandidateLink>> per_orphan;
    for (PageId orphan : Orphans(w.snapshot)) {
      std::vector<CandidateLink> found;
      if (!corpus.empty()) {
        found = FindlinkCandidates(orphan, w.catalog.TitleOf(orphan), corpus,
                                   w.snapshot, findlink_options);
      }
      auto cross = CrosslingualCandidates(orphan, w.language, graphs);
      found.insert(found.end(), cross.candidates.begin(), cross.candidates.end());
      std::erase_if(found, [&](const CandidateLink &c) {
        const bool bad = !IsValidCandidate(c, w.snapshot);
        results[i].invalid += bad;
        return bad;
      });
      if (!found.empty()) per_orphan.emplace(orphan, std::move(found));
    }
    results[i].coverage = ComputeCoverage(w.snapshot, per_orphan);
    for (auto &[orphan, list] : per_orphan) {
      results[i].candidates.insert(results[i].candidates.end(), list.begin(),
                                   list.end());
    }
  });

  const fs::path candidates_path = config.out / "candidates.tsv";
  auto out = OpenOutput(candidates_path);
  WriteCandidatesHeader(out);
  const fs::path coverage_path = config.out / "coverage.tsv";
  auto coverage_out = OpenOutput(coverage_path);
  WriteCoverageHeader(coverage_out);
  uint64_t total = 0;
  for (size_t i = 0; i < wikis.size(); ++i) {
    WriteCandidates(out, results[i].candidates, wikis[i].catalog);
    WriteCoverage(coverage_out, results[i].coverage);
    total += results[i].candidates.size();
    if (results[i].invalid > 0) {
      log << "oatlas: " << wikis[i].language << ": dropped " << results[i].invalid
          << " candidates that failed re-validation\n";
    }
  }
  CloseOutput(out, candidates_path);
  CloseOutput(coverage_out, coverage_path);
  log << "oatlas: candidates: " << total << " suggestions\n";
}

void RunStage(Stage stage, const RunConfig &config, std::ostream &log) {
  switch (stage) {
    case Stage::kIngest: return RunIngest(config, log);
    case Stage::kOrphans: return RunOrphans(config, log);
    case Stage::kCharacterize: return RunCharacterize(config, log);
    case Stage::kPanel: return RunPanel(config, log);
    case Stage::kDid: return RunDid(config, log);
    case Stage::kCandidates: return RunCandidates(config, log);
    case Stage::kAll:
      RunIngest(config, log);
      RunOrphans(config, log);
      RunCharacterize(config, log);
      RunPanel(config, log);
      RunCandidates(config, log);
      RunDid(config, log);
      return;
  }
}

}  // namespace oatlas
