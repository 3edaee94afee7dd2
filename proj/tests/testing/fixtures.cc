#include "testing/fixtures.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

namespace oatlas::testing {

Month M(const char *text) {
  auto m = Month::Parse(text);
  if (!m) throw std::invalid_argument(text);
  return *m;
}

namespace {

double Uniform(Rng &rng) { return std::uniform_real_distribution<double>(0, 1)(rng); }

size_t Pick(Rng &rng, size_t n) {
  return std::uniform_int_distribution<size_t>(0, n - 1)(rng);
}

std::vector<PageId> DistinctIds(Rng &rng, size_t n, PageId lo, PageId hi) {
  std::set<PageId> ids;
  std::uniform_int_distribution<PageId> dist(lo, hi);
  while (ids.size() < n) ids.insert(dist(rng));
  std::vector<PageId> out(ids.begin(), ids.end());
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

WikiFixture RandomWiki(Rng &rng, const WikiShape &shape) {
  WikiFixture wiki;
  wiki.month = M("2022-11");
  const size_t total = shape.articles + shape.redirects + shape.non_main;
  const auto ids = DistinctIds(rng, total, 1, 10 * total + 10);
  size_t next = 0;
  std::vector<const char *> odd_titles = {"O'Brien", "Caf\xc3\xa9", "Back\\slash",
                                          "Quote\"d", "Tab\tbed"};
  for (int i = 0; i < shape.articles; ++i) {
    std::string title = "A_" + std::to_string(i);
    if (i < static_cast<int>(odd_titles.size())) title = odd_titles[i];
    wiki.pages.push_back({ids[next++], 0, title, false});
  }
  for (int i = 0; i < shape.redirects; ++i) {
    wiki.pages.push_back({ids[next++], 0, "R_" + std::to_string(i), true});
  }
  const int namespaces[] = {1, 2, 4, 10, 14};
  for (int i = 0; i < shape.non_main; ++i) {
    std::string title = Uniform(rng) < 0.5
                            ? wiki.pages[Pick(rng, shape.articles)].title
                            : "N_" + std::to_string(i);
    wiki.pages.push_back({ids[next++], namespaces[Pick(rng, 5)], title,
                          Uniform(rng) < 0.2});
  }
  const PageId max_id = *std::max_element(ids.begin(), ids.end());

  auto article_title = [&] { return wiki.pages[Pick(rng, shape.articles)].title; };
  auto redirect_title = [&] {
    return wiki.pages[shape.articles + Pick(rng, shape.redirects)].title;
  };
  for (int i = 0; i < shape.redirects; ++i) {
    const PageRecord &page = wiki.pages[shape.articles + i];
    const double u = Uniform(rng);
    if (u < 0.55) {
      wiki.redirects.push_back({page.page_id, 0, article_title()});
    } else if (u < 0.8 && shape.redirects > 0) {
      wiki.redirects.push_back({page.page_id, 0, redirect_title()});
    } else if (u < 0.9) {
      wiki.redirects.push_back({page.page_id, 0, "Missing_" + std::to_string(i)});
    } else if (u < 0.95) {
      wiki.redirects.push_back({page.page_id, 4, article_title()});
    }
    // else: a redirect page without a redirect row
  }
  // Rows whose source is not a redirect page.
  for (int i = 0; i < 3 && shape.articles > 0; ++i) {
    wiki.redirects.push_back({wiki.pages[Pick(rng, shape.articles)].page_id, 0,
                              article_title()});
    wiki.redirects.push_back({max_id + 100 + i, 0, article_title()});
  }

  for (int i = 0; i < shape.links; ++i) {
    RawLink link;
    double u = Uniform(rng);
    if (u < 0.85) {
      link.from_page_id = wiki.pages[Pick(rng, shape.articles)].page_id;
    } else if (u < 0.92 && shape.redirects > 0) {
      link.from_page_id = wiki.pages[shape.articles + Pick(rng, shape.redirects)].page_id;
    } else if (u < 0.97 && shape.non_main > 0) {
      link.from_page_id =
          wiki.pages[shape.articles + shape.redirects + Pick(rng, shape.non_main)].page_id;
    } else {
      link.from_page_id = max_id + 1 + Pick(rng, 50);
    }
    u = Uniform(rng);
    if (u < 0.6) {
      link.target_title = article_title();
    } else if (u < 0.85 && shape.redirects > 0) {
      link.target_title = redirect_title();
    } else if (u < 0.92) {
      link.target_title = "Red_" + std::to_string(Pick(rng, 30));
    } else {
      link.target_namespace = namespaces[Pick(rng, 5)];
      link.target_title = article_title();
    }
    wiki.links.push_back(link);
  }
  return wiki;
}

std::vector<SqlRow> PageRows(const WikiFixture &wiki) {
  std::vector<SqlRow> rows;
  for (const PageRecord &p : wiki.pages) {
    rows.push_back({SqlValue::Integer(static_cast<int64_t>(p.page_id)),
                    SqlValue::Integer(p.namespace_id), SqlValue::String(p.title),
                    SqlValue::Integer(p.is_redirect ? 1 : 0),
                    SqlValue::Integer(static_cast<int64_t>(p.title.size() * 37))});
  }
  return rows;
}

std::vector<SqlRow> RedirectRows(const WikiFixture &wiki) {
  std::vector<SqlRow> rows;
  for (const RedirectRecord &r : wiki.redirects) {
    rows.push_back({SqlValue::Integer(static_cast<int64_t>(r.from_page_id)),
                    SqlValue::Integer(r.target_namespace),
                    SqlValue::String(r.target_title), SqlValue::String(""),
                    SqlValue::String("")});
  }
  return rows;
}

std::vector<SqlRow> PagelinkRows(const WikiFixture &wiki) {
  std::vector<SqlRow> rows;
  for (const RawLink &l : wiki.links) {
    rows.push_back({SqlValue::Integer(static_cast<int64_t>(l.from_page_id)),
                    SqlValue::Integer(l.target_namespace),
                    SqlValue::String(l.target_title), SqlValue::Integer(0)});
  }
  return rows;
}

std::string DumpEscape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\'': out += "\\'"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\0': out += "\\0"; break;
      case '\x1a': out += "\\Z"; break;
      default: out += c;
    }
  }
  return out;
}

void WriteDump(std::ostream &out, std::string_view table, std::span<const SqlRow> rows,
               size_t rows_per_statement) {
  out << "-- fixture dump\n/*!40101 SET NAMES binary */;\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    out << (i % rows_per_statement == 0 ? "INSERT INTO `" + std::string(table) +
                                              "` VALUES ("
                                        : std::string(",("));
    for (size_t j = 0; j < rows[i].size(); ++j) {
      if (j > 0) out << ',';
      const SqlValue &v = rows[i][j];
      switch (v.type) {
        case SqlType::kNull: out << "NULL"; break;
        case SqlType::kInteger: out << v.integer; break;
        case SqlType::kReal: {
          char buf[64];
          std::snprintf(buf, sizeof buf, "%.17g", v.real);
          std::string text = buf;
          if (text.find_first_of(".e") == std::string::npos) text += ".0";
          out << text;
          break;
        }
        case SqlType::kString: out << '\'' << DumpEscape(v.text) << '\''; break;
      }
    }
    out << ')';
    if (i + 1 == rows.size() || (i + 1) % rows_per_statement == 0) out << ";\n";
  }
}

// ---------------------------------------------------------------------------

EdgeList RandomGraph(Rng &rng, int n, double p, PageId first_id) {
  EdgeList g;
  for (int i = 0; i < n; ++i) g.articles.push_back(first_id + 3 * i);
  std::bernoulli_distribution coin(p);
  for (PageId a : g.articles) {
    for (PageId b : g.articles) {
      if (a != b && coin(rng)) g.edges.push_back({a, b});
    }
  }
  return g;
}

EdgeList Evolve(Rng &rng, const EdgeList &g, double churn) {
  EdgeList next;
  std::set<PageId> deleted;
  for (PageId a : g.articles) {
    if (Uniform(rng) < churn / 4) {
      deleted.insert(a);
    } else {
      next.articles.push_back(a);
    }
  }
  PageId top = g.articles.empty() ? 1 : g.articles.back() + 1;
  const int created = static_cast<int>(std::ceil(g.articles.size() * churn / 4));
  for (int i = 0; i < created; ++i) next.articles.push_back(top + 2 * i);
  std::set<std::pair<PageId, PageId>> edges;
  for (const Edge &e : g.edges) {
    if (deleted.count(e.from) || deleted.count(e.to)) continue;
    if (Uniform(rng) < churn) continue;
    edges.insert({e.from, e.to});
  }
  const size_t additions = static_cast<size_t>(g.edges.size() * churn) + 3;
  for (size_t i = 0; i < additions && next.articles.size() > 1; ++i) {
    PageId a = next.articles[Pick(rng, next.articles.size())];
    PageId b = next.articles[Pick(rng, next.articles.size())];
    if (a != b) edges.insert({a, b});
  }
  for (const auto &[a, b] : edges) next.edges.push_back({a, b});
  return next;
}

LinkSnapshot ToSnapshot(const EdgeList &g, std::string language, Month month) {
  return LinkSnapshot::FromEdges(std::move(language), month, g.articles, g.edges);
}

// ---------------------------------------------------------------------------

std::vector<LanguageFixture> RandomMultiWiki(Rng &rng, const MultiWikiShape &shape,
                                             Month month) {
  static const char *const kCodes[] = {"ar", "de", "en", "fr", "it", "ja", "nl", "pl"};
  if (shape.languages > 8) throw std::invalid_argument("at most 8 languages");
  std::vector<LanguageFixture> wikis(shape.languages);
  for (int l = 0; l < shape.languages; ++l) {
    LanguageFixture &w = wikis[l];
    w.language = kCodes[l];
    const PageId base = 1000 * (l + 1);
    std::vector<PageId> pages;
    PageId next = base;
    for (int item = 1; item <= shape.items; ++item) {
      if (Uniform(rng) >= shape.item_coverage) continue;
      next += 1 + Pick(rng, 3);
      pages.push_back(next);
      w.qids[next] = Qid(item);
    }
    for (int i = 0; i < shape.unmapped_articles; ++i) {
      next += 1 + Pick(rng, 3);
      pages.push_back(next);
    }
    w.before.articles = pages;
    std::bernoulli_distribution coin(shape.edge_probability);
    for (PageId a : pages) {
      for (PageId b : pages) {
        if (a != b && coin(rng)) w.before.edges.push_back({a, b});
      }
    }
    w.after = shape.churn > 0 ? Evolve(rng, w.before, shape.churn) : w.before;
    w.before_snapshot = ToSnapshot(w.before, w.language, month);
    w.after_snapshot = ToSnapshot(w.after, w.language, month.Next());
    std::set<PageId> all(w.before.articles.begin(), w.before.articles.end());
    all.insert(w.after.articles.begin(), w.after.articles.end());
    std::vector<CatalogEntry> entries;
    for (PageId p : all) {
      CatalogEntry e{p, w.language + "_" + std::to_string(p), std::nullopt};
      if (auto it = w.qids.find(p); it != w.qids.end()) e.qid = it->second;
      entries.push_back(e);
    }
    w.catalog = ArticleCatalog(w.language, std::move(entries));
  }
  return wikis;
}

std::vector<PageviewRecord> RandomPageviews(Rng &rng,
                                            std::span<const LanguageFixture> wikis,
                                            Month month, int window,
                                            double missing_rate) {
  std::vector<PageviewRecord> records;
  const ReferrerClass classes[] = {ReferrerClass::kInternal, ReferrerClass::kExternal,
                                   ReferrerClass::kUnknown};
  for (const LanguageFixture &w : wikis) {
    std::set<PageId> pages(w.before.articles.begin(), w.before.articles.end());
    pages.insert(w.after.articles.begin(), w.after.articles.end());
    for (PageId p : pages) {
      // Article-level popularity so controls differ in pre-period levels.
      const double scale = std::exp(4.0 * Uniform(rng));
      for (int d = -window; d <= window; ++d) {
        uint64_t sum = 0;
        for (ReferrerClass r : classes) {
          const uint64_t v = static_cast<uint64_t>(scale * Uniform(rng) * 10);
          if (Uniform(rng) < missing_rate) continue;
          records.push_back({w.language, p, month.Plus(d), r, v});
          sum += v;
        }
        if (Uniform(rng) < 0.2) {
          records.push_back({w.language, p, month.Plus(d), ReferrerClass::kAll,
                             sum + Pick(rng, 5)});
        }
      }
    }
  }
  return records;
}

PageviewTable ToTable(std::span<const PageviewRecord> records) {
  PageviewTable table;
  for (const PageviewRecord &r : records) {
    if (!table.Insert(r)) throw std::logic_error("duplicate pageview fixture row");
  }
  return table;
}

// ---------------------------------------------------------------------------

namespace {

const char *const kSyllables[] = {"zor", "vek", "thal", "mir", "quen", "dra",
                                  "pol", "xan", "ul",   "bry", "kes",  "nov",
                                  "ter", "gim", "hal",  "oro"};
const char *const kFiller[] = {"the", "river", "flows", "north", "and", "a",
                               "city", "was", "founded", "in", "spring", "by",
                               "merchants", "who", "built", "walls", "of", "stone"};

std::string Word(Rng &rng) {
  std::string w = std::string(kSyllables[Pick(rng, 16)]) + kSyllables[Pick(rng, 16)];
  w[0] = static_cast<char>(w[0] - 'a' + 'A');
  return w;
}

}  // namespace

FindlinkFixture PlantedCorpus(Rng &rng, int documents) {
  FindlinkFixture fx;
  const int n_articles = documents + 40;
  std::set<std::string> used;
  std::vector<PageId> pages;
  std::vector<std::string> titles;  // dump form
  for (int i = 0; i < n_articles; ++i) {
    std::string title;
    do {
      title = Word(rng) + "_" + Word(rng);
    } while (!used.insert(title).second);
    pages.push_back(10 + 7 * i);
    titles.push_back(title);
  }
  std::vector<bool> is_orphan(n_articles);
  for (int i = 0; i < n_articles; ++i) is_orphan[i] = Uniform(rng) < 0.3;
  EdgeList g;
  g.articles = pages;
  std::set<std::pair<PageId, PageId>> edges;
  for (int i = 0; i < n_articles; ++i) {
    if (is_orphan[i]) continue;
    // Every non-orphan gets at least one in-link.
    int from;
    do {
      from = static_cast<int>(Pick(rng, n_articles));
    } while (from == i);
    edges.insert({pages[from], pages[i]});
    for (int k = 0; k < 2; ++k) {
      int other = static_cast<int>(Pick(rng, n_articles));
      if (other != i) edges.insert({pages[other], pages[i]});
    }
  }
  for (const auto &[a, b] : edges) g.edges.push_back({a, b});
  fx.snapshot = ToSnapshot(g, "xx", M("2022-12"));
  std::vector<CatalogEntry> entries;
  for (int i = 0; i < n_articles; ++i) {
    entries.push_back({pages[i], titles[i], std::nullopt});
    if (is_orphan[i]) fx.orphans.push_back(pages[i]);
  }
  fx.catalog = ArticleCatalog("xx", entries);

  std::vector<int> orphan_index;
  for (int i = 0; i < n_articles; ++i) {
    if (is_orphan[i]) orphan_index.push_back(i);
  }
  auto spaced = [&](int i) {
    std::string t = titles[i];
    std::replace(t.begin(), t.end(), '_', ' ');
    return t;
  };

  for (int d = 0; d < documents + 5; ++d) {
    AnnotatedDocument doc;
    doc.language = "xx";
    const bool in_snapshot = d < documents;
    const int source = in_snapshot ? d : -1;
    doc.page_id = in_snapshot ? pages[d] : 5 + 7 * (n_articles + d);
    std::string &text = doc.text;
    auto filler = [&] {
      const int n = 1 + static_cast<int>(Pick(rng, 4));
      for (int k = 0; k < n; ++k) {
        text += kFiller[Pick(rng, 18)];
        text += ' ';
      }
    };
    const int segments = 3 + static_cast<int>(Pick(rng, 6));
    for (int s = 0; s < segments; ++s) {
      filler();
      if (orphan_index.empty()) continue;
      const int target = orphan_index[Pick(rng, orphan_index.size())];
      std::string mention = spaced(target);
      const double u = Uniform(rng);
      const char *open = Uniform(rng) < 0.3 ? "\xc2\xab" : "";  // guillemet
      const char *close = *open ? "\xc2\xbb" : "";
      if (u < 0.45) {
        // A genuine unlinked mention; first letter case is free.
        if (Uniform(rng) < 0.5) mention[0] = static_cast<char>(mention[0] - 'A' + 'a');
        text += open;
        const size_t begin = text.size();
        text += mention;
        const size_t end = text.size();
        text += close;
        text += Uniform(rng) < 0.5 ? ", " : ". ";
        if (in_snapshot && source != target) {
          fx.planted.push_back({pages[source], pages[target], {begin, end}});
        }
      } else if (u < 0.6) {
        // Already linked: the mention sits inside an existing link span.
        const size_t begin = text.size();
        text += mention;
        if (Uniform(rng) < 0.5) text += " " + std::string(kFiller[Pick(rng, 18)]);
        doc.links.push_back({begin, text.size(), pages[Pick(rng, n_articles)]});
        text += ' ';
      } else if (u < 0.7) {
        text += mention + "s ";  // no boundary on the right
      } else if (u < 0.78) {
        text += "x" + mention + ' ';  // no boundary on the left
      } else if (u < 0.84) {
        text += "\xc3\xa9" + mention + ' ';  // a non-ASCII letter glued on
      } else if (u < 0.92) {
        // Case differs after the first character.
        const size_t space = mention.find(' ');
        mention[space + 1] = static_cast<char>(mention[space + 1] - 'A' + 'a');
        text += mention + ' ';
      } else {
        std::string upper = mention;
        for (char &c : upper) c = static_cast<char>(std::toupper(c));
        text += upper + ' ';
      }
    }
    filler();
    fx.corpus.push_back(std::move(doc));
  }
  std::sort(fx.planted.begin(), fx.planted.end());
  return fx;
}

// ---------------------------------------------------------------------------

std::vector<PanelObservation> SyntheticPanel(Rng &rng,
                                             const SyntheticPanelOptions &o) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const Month treatment = M("2022-11");
  std::vector<double> period_effect(2 * o.window + 1);
  for (double &d : period_effect) d = 0.1 * normal(rng);
  const double innovation = o.noise_sd * std::sqrt(1 - o.autocorrelation * o.autocorrelation);

  std::vector<PanelObservation> panel;
  panel.reserve(o.pairs * 4 * o.window);
  for (size_t i = 0; i < o.pairs; ++i) {
    const double pair_effect = 8.0 + o.pair_sd * normal(rng);
    const std::string treated_language = "l" + std::to_string(i % o.languages);
    for (Role role : {Role::kTreated, Role::kControl}) {
      double noise = o.noise_sd * normal(rng);
      for (int p = -o.window; p <= o.window; ++p) {
        if (p > -o.window) noise = o.autocorrelation * noise + innovation * normal(rng);
        if (p == 0) continue;
        PanelObservation obs;
        obs.pair_id = i + 1;
        obs.role = role;
        obs.treated_language = treated_language;
        obs.language = role == Role::kTreated ? treated_language : "ctl";
        obs.page_id = 2 * (i + 1) + (role == Role::kControl);
        obs.month = treatment.Plus(p);
        obs.period_index = p;
        double y = pair_effect + period_effect[p + o.window] + noise;
        if (role == Role::kTreated) {
          y += o.role_offset;
          if (p > 0) y += o.effect;
        }
        obs.log_views = y;
        obs.views = static_cast<uint64_t>(std::llround(std::expm1(std::max(y, 0.0))));
        panel.push_back(std::move(obs));
      }
    }
  }
  return panel;
}

std::vector<PanelObservation> RandomTwoByTwoPanel(Rng &rng, size_t pairs, int window) {
  std::vector<PanelObservation> panel;
  std::uniform_real_distribution<double> level(0.0, 8.0);
  const Month treatment = M("2022-11");
  for (size_t i = 0; i < pairs; ++i) {
    for (Role role : {Role::kTreated, Role::kControl}) {
      for (int p = -window; p <= window; ++p) {
        if (p == 0) continue;
        PanelObservation obs;
        obs.pair_id = i + 1;
        obs.role = role;
        obs.treated_language = "aa";
        obs.language = role == Role::kTreated ? "aa" : "bb";
        obs.page_id = i + 1;
        obs.month = treatment.Plus(p);
        obs.period_index = p;
        obs.views = static_cast<uint64_t>(std::exp(level(rng)));
        obs.log_views = std::log1p(static_cast<double>(obs.views));
        panel.push_back(obs);
      }
    }
  }
  return panel;
}

// ---------------------------------------------------------------------------

std::vector<FeatureRecord> RandomFeatures(Rng &rng, std::string language,
                                          std::span<const PageId> pages) {
  std::vector<FeatureRecord> out;
  for (PageId p : pages) {
    FeatureRecord r;
    r.language = language;
    r.page_id = p;
    r.bot_created = Uniform(rng) < 0.3;
    if (Uniform(rng) < 0.4) r.is_woman_biography = Uniform(rng) < 0.35;
    for (int t = 0; t < kNumTopics; ++t) {
      r.topic_probabilities[t] = std::round(Uniform(rng) * 20) / 20;
      r.topic_labels[t] = r.topic_probabilities[t] > kTopicThreshold;
    }
    // Coarse values so medians see ties.
    r.quality_score = std::round(Uniform(rng) * 10) / 10;
    r.creation_timestamp = 1000000 + 86400 * static_cast<int64_t>(Pick(rng, 50));
    out.push_back(r);
  }
  return out;
}

}  // namespace oatlas::testing
