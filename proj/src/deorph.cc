#include "oatlas/deorph.h"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>
#include "oatlas/errors.h"
#include "oatlas/text.h"
#include "oatlas/tsv.h"

namespace oatlas {

void ValidateDocument(const AnnotatedDocument &doc) {
  size_t prev_end = 0;
  for (const LinkSpan &link : doc.links) {
    if (link.begin >= link.end || link.end > doc.text.size()) {
      throw DataError("document " + std::to_string(doc.page_id) +
                      ": link span out of range");
    }
    if (link.begin < prev_end) {
      throw DataError("document " + std::to_string(doc.page_id) +
                      ": link spans overlap or are unsorted");
    }
    prev_end = link.end;
  }
}

std::vector<AnnotatedDocument> ReadCorpusJsonl(std::istream &in,
                                               const std::string &language) {
  std::vector<AnnotatedDocument> docs;
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    AnnotatedDocument doc;
    doc.language = language;
    try {
      const auto j = nlohmann::json::parse(line);
      doc.page_id = j.at("page_id").get<PageId>();
      doc.text = j.at("text").get<std::string>();
      if (j.contains("links")) {
        for (const auto &l : j.at("links")) {
          if (!l.is_array() || l.size() != 3) {
            throw DataError("link must be [begin, end, target]");
          }
          doc.links.push_back(
              {l[0].get<size_t>(), l[1].get<size_t>(), l[2].get<PageId>()});
        }
      }
    } catch (const nlohmann::json::exception &e) {
      throw DataError("corpus line " + std::to_string(line_number) + ": " +
                      e.what());
    }
    std::sort(doc.links.begin(), doc.links.end(),
              [](const LinkSpan &a, const LinkSpan &b) { return a.begin < b.begin; });
    ValidateDocument(doc);
    docs.push_back(std::move(doc));
  }
  return docs;
}

void WriteCorpusJsonl(std::ostream &out, std::span<const AnnotatedDocument> docs) {
  for (const AnnotatedDocument &doc : docs) {
    nlohmann::ordered_json j;
    j["page_id"] = doc.page_id;
    j["text"] = doc.text;
    j["links"] = nlohmann::ordered_json::array();
    for (const LinkSpan &l : doc.links) {
      j["links"].push_back({l.begin, l.end, l.target});
    }
    out << j.dump() << '\n';
  }
}

std::string_view MethodName(CandidateMethod m) {
  return m == CandidateMethod::kFindlink ? "findlink" : "crosslingual";
}

std::string_view StatusName(CandidateStatus s) {
  switch (s) {
    case CandidateStatus::kOk: return "ok";
    case CandidateStatus::kNotArticle: return "not_article";
    case CandidateStatus::kNotOrphan: return "not_orphan";
    case CandidateStatus::kNoQid: return "no_qid";
  }
  return "?";
}

namespace {

std::u32string DecodeAll(std::string_view s) {
  std::u32string out;
  for (size_t pos = 0; pos < s.size();) {
    char32_t cp;
    pos += DecodeUtf8(s, pos, cp);
    out.push_back(cp);
  }
  return out;
}

// Returns the end byte of a match of `pattern` at `pos`, or npos.
size_t MatchAt(std::string_view text, size_t pos, const std::u32string &pattern,
               bool case_insensitive) {
  for (size_t i = 0; i < pattern.size(); ++i) {
    if (pos >= text.size()) return std::string_view::npos;
    char32_t cp;
    pos += DecodeUtf8(text, pos, cp);
    const char32_t want = pattern[i];
    bool ok = cp == want;
    if (!ok && (i == 0 || case_insensitive)) ok = ToLower(cp) == ToLower(want);
    if (!ok) return std::string_view::npos;
  }
  return pos;
}

}  // namespace

std::vector<TextSpan> FindMentions(std::string_view text, std::string_view title,
                                   std::span<const LinkSpan> links,
                                   const FindlinkOptions &options) {
  std::string spaced(title);
  std::replace(spaced.begin(), spaced.end(), '_', ' ');
  const std::u32string pattern = DecodeAll(spaced);
  std::vector<TextSpan> found;
  if (pattern.empty()) return found;
  const bool check_left = IsAlnum(pattern.front());
  const bool check_right = IsAlnum(pattern.back());

  size_t link = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    char32_t cp;
    const size_t len = DecodeUtf8(text, pos, cp);
    const size_t end = MatchAt(text, pos, pattern, options.case_insensitive);
    bool accept = end != std::string_view::npos;
    if (accept && check_left && pos > 0 && IsAlnum(CodePointBefore(text, pos))) {
      accept = false;
    }
    if (accept && check_right && end < text.size()) {
      char32_t next;
      DecodeUtf8(text, end, next);
      if (IsAlnum(next)) accept = false;
    }
    if (accept) {
      while (link < links.size() && links[link].end <= pos) ++link;
      if (link < links.size() && links[link].begin < end) accept = false;
    }
    if (accept) {
      found.push_back({pos, end});
      pos = end;
    } else {
      pos += len;
    }
  }
  return found;
}

std::vector<CandidateLink> FindlinkCandidates(
    PageId orphan, std::string_view title,
    std::span<const AnnotatedDocument> corpus, const LinkSnapshot &snapshot,
    const FindlinkOptions &options) {
  std::vector<CandidateLink> out;
  for (const AnnotatedDocument &doc : corpus) {
    if (doc.page_id == orphan) continue;
    const auto source = snapshot.IndexOf(doc.page_id);
    if (!source) continue;
    if (snapshot.HasEdge(doc.page_id, orphan)) continue;
    auto mentions = FindMentions(doc.text, title, doc.links, options);
    if (mentions.empty()) continue;
    CandidateLink c;
    c.language = snapshot.language();
    c.source_page_id = doc.page_id;
    c.target_page_id = orphan;
    c.method = CandidateMethod::kFindlink;
    c.mentions = std::move(mentions);
    c.source_is_orphan = snapshot.InDegree(*source) == 0;
    out.push_back(std::move(c));
  }
  // A corpus could list the same page twice; keep the first.
  std::stable_sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
    return a.source_page_id < b.source_page_id;
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const auto &a, const auto &b) {
                          return a.source_page_id == b.source_page_id;
                        }),
            out.end());
  std::stable_sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
    return a.mentions.size() > b.mentions.size();
  });
  return out;
}

CrosslingualResult CrosslingualCandidates(PageId orphan, std::string_view language,
                                          std::span<const LanguageGraph> graphs) {
  const LanguageGraph *home = nullptr;
  for (const LanguageGraph &g : graphs) {
    if (!g.snapshot || !g.catalog || !g.inlinks) {
      throw std::invalid_argument("language graph for " + g.language +
                                  " is incomplete");
    }
    if (g.language == language) home = &g;
  }
  if (!home) {
    throw std::invalid_argument("no graph for language " + std::string(language));
  }
  CrosslingualResult result;
  const auto orphan_index = home->snapshot->IndexOf(orphan);
  if (!orphan_index) {
    result.status = CandidateStatus::kNotArticle;
    return result;
  }
  if (home->snapshot->InDegree(*orphan_index) != 0) {
    result.status = CandidateStatus::kNotOrphan;
    return result;
  }
  const auto qid = home->catalog->QidOf(orphan);
  if (!qid) {
    result.status = CandidateStatus::kNoQid;
    return result;
  }

  std::map<PageId, std::set<std::string>> vetting;
  for (const LanguageGraph &g : graphs) {
    if (&g == home) continue;
    const auto other = g.catalog->PageOf(*qid);
    if (!other) continue;
    const auto other_index = g.snapshot->IndexOf(*other);
    if (!other_index) continue;
    for (uint32_t s : g.inlinks->InLinks(*other_index)) {
      const auto source_qid = g.catalog->QidOf(g.snapshot->PageAt(s));
      if (!source_qid) continue;
      const auto source = home->catalog->PageOf(*source_qid);
      if (!source || *source == orphan) continue;
      if (!home->snapshot->Contains(*source)) continue;
      if (home->snapshot->HasEdge(*source, orphan)) continue;
      vetting[*source].insert(g.language);
    }
  }

  for (auto &[source, langs] : vetting) {
    CandidateLink c;
    c.language = std::string(language);
    c.source_page_id = source;
    c.target_page_id = orphan;
    c.method = CandidateMethod::kCrosslingual;
    c.vetting_languages.assign(langs.begin(), langs.end());
    c.source_is_orphan =
        home->snapshot->InDegree(*home->snapshot->IndexOf(source)) == 0;
    result.candidates.push_back(std::move(c));
  }
  std::stable_sort(result.candidates.begin(), result.candidates.end(),
                   [](const auto &a, const auto &b) {
                     return a.vetting_languages.size() > b.vetting_languages.size();
                   });
  return result;
}

bool IsValidCandidate(const CandidateLink &candidate, const LinkSnapshot &snapshot) {
  if (candidate.language != snapshot.language()) return false;
  if (candidate.source_page_id == candidate.target_page_id) return false;
  const auto target = snapshot.IndexOf(candidate.target_page_id);
  if (!target || snapshot.InDegree(*target) != 0) return false;
  if (!snapshot.Contains(candidate.source_page_id)) return false;
  return !snapshot.HasEdge(candidate.source_page_id, candidate.target_page_id);
}

CoverageReport ComputeCoverage(
    const LinkSnapshot &snapshot,
    const std::map<PageId, std::vector<CandidateLink>> &candidates) {
  CoverageReport report;
  report.language = snapshot.language();
  const OrphanSet orphans = OrphanSet::Of(snapshot);
  report.n_orphans = orphans.pages.size();
  auto tally = [](size_t n, uint64_t &ge1, uint64_t &ge10) {
    if (n >= 1) ++ge1;
    if (n >= 10) ++ge10;
  };
  for (PageId orphan : orphans.pages) {
    const auto it = candidates.find(orphan);
    if (it == candidates.end()) continue;
    std::set<PageId> all, findlink, crosslingual;
    for (const CandidateLink &c : it->second) {
      all.insert(c.source_page_id);
      (c.method == CandidateMethod::kFindlink ? findlink : crosslingual)
          .insert(c.source_page_id);
    }
    tally(all.size(), report.n_with_ge1_candidate, report.n_with_ge10_candidates);
    tally(findlink.size(), report.findlink.n_with_ge1, report.findlink.n_with_ge10);
    tally(crosslingual.size(), report.crosslingual.n_with_ge1,
          report.crosslingual.n_with_ge10);
  }
  return report;
}

void WriteCandidatesHeader(std::ostream &out) {
  out << "language\tsource_page_id\tsource_title\ttarget_page_id\ttarget_title"
         "\tmethod\tevidence\tsource_is_orphan\n";
}

void WriteCandidates(std::ostream &out, std::span<const CandidateLink> candidates,
                     const ArticleCatalog &catalog) {
  for (const CandidateLink &c : candidates) {
    std::string evidence;
    if (c.method == CandidateMethod::kFindlink) {
      for (const TextSpan &m : c.mentions) {
        if (!evidence.empty()) evidence += ',';
        evidence += std::to_string(m.begin) + '-' + std::to_string(m.end);
      }
    } else {
      for (const std::string &l : c.vetting_languages) {
        if (!evidence.empty()) evidence += ',';
        evidence += l;
      }
    }
    out << c.language << '\t' << c.source_page_id << '\t'
        << TsvEscape(catalog.TitleOf(c.source_page_id)) << '\t'
        << c.target_page_id << '\t' << TsvEscape(catalog.TitleOf(c.target_page_id))
        << '\t' << MethodName(c.method) << '\t' << evidence << '\t'
        << (c.source_is_orphan ? 1 : 0) << '\n';
  }
}

void WriteCoverageHeader(std::ostream &out) {
  out << "language\tn_orphans\tn_ge1\tn_ge10\tfindlink_ge1\tfindlink_ge10"
         "\tcrosslingual_ge1\tcrosslingual_ge10\n";
}

void WriteCoverage(std::ostream &out, const CoverageReport &r) {
  out << r.language << '\t' << r.n_orphans << '\t' << r.n_with_ge1_candidate << '\t'
      << r.n_with_ge10_candidates << '\t' << r.findlink.n_with_ge1 << '\t'
      << r.findlink.n_with_ge10 << '\t' << r.crosslingual.n_with_ge1 << '\t'
      << r.crosslingual.n_with_ge10 << '\n';
}

}  // namespace oatlas
