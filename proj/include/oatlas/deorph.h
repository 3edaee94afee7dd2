#ifndef OATLAS_DEORPH_H_
#define OATLAS_DEORPH_H_

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oatlas/catalog.h"
#include "oatlas/graph.h"

namespace oatlas {

// Byte range [begin, end) of a document's text.
struct TextSpan {
  size_t begin = 0;
  size_t end = 0;
  friend auto operator<=>(const TextSpan &, const TextSpan &) = default;
};

struct LinkSpan {
  size_t begin = 0;
  size_t end = 0;
  PageId target = 0;
};

// Plain article text with the byte ranges that already carry links.
struct AnnotatedDocument {
  std::string language;
  PageId page_id = 0;
  std::string text;
  std::vector<LinkSpan> links;  // sorted, non-overlapping, within text
};

// Throws DataError unless the link spans are sorted, non-overlapping and
// within the text.
void ValidateDocument(const AnnotatedDocument &doc);

// One JSON object per line: {"page_id": 12, "text": "...", "links":
// [[begin, end, target], ...]}.
std::vector<AnnotatedDocument> ReadCorpusJsonl(std::istream &in,
                                               const std::string &language);
void WriteCorpusJsonl(std::ostream &out, std::span<const AnnotatedDocument> docs);

enum class CandidateMethod {
  kFindlink,
  kCrosslingual,
};

std::string_view MethodName(CandidateMethod m);

// A suggested new link source -> target, where target is an orphan.
struct CandidateLink {
  std::string language;
  PageId source_page_id = 0;
  PageId target_page_id = 0;
  CandidateMethod method = CandidateMethod::kFindlink;
  std::vector<TextSpan> mentions;              // findlink evidence
  std::vector<std::string> vetting_languages;  // cross-lingual evidence, sorted
  bool source_is_orphan = false;
};

struct FindlinkOptions {
  // By default only the first character of the title is matched without
  // regard to case.
  bool case_insensitive = false;
};

// Occurrences of `title` (underscores read as spaces) in `text` that sit on
// word boundaries and do not overlap any of `links`. Overlapping occurrences
// are resolved leftmost first.
std::vector<TextSpan> FindMentions(std::string_view text, std::string_view title,
                                   std::span<const LinkSpan> links,
                                   const FindlinkOptions &options = {});

// Articles of `snapshot` whose text mentions the orphan's title outside
// existing links. The orphan's own document is skipped. Ordered by mention
// count, most first, then by source page id.
std::vector<CandidateLink> FindlinkCandidates(
    PageId orphan, std::string_view title,
    std::span<const AnnotatedDocument> corpus, const LinkSnapshot &snapshot,
    const FindlinkOptions &options = {});

// A language's graph with the lookups cross-lingual matching needs.
struct LanguageGraph {
  std::string language;
  const LinkSnapshot *snapshot = nullptr;
  const ArticleCatalog *catalog = nullptr;
  const InLinkIndex *inlinks = nullptr;
};

enum class CandidateStatus {
  kOk,
  kNotArticle,
  kNotOrphan,
  kNoQid,
};

std::string_view StatusName(CandidateStatus s);

struct CrosslingualResult {
  CandidateStatus status = CandidateStatus::kOk;
  std::vector<CandidateLink> candidates;
};

// For each other language where the orphan's item has an article a', every
// in-link s' -> a' whose item also has an article s in the orphan's language
// proposes s -> orphan, unless that edge exists or s is the orphan. Proposals
// from several languages merge into one candidate listing all of them.
// Ordered by number of vetting languages, most first, then by source id.
CrosslingualResult CrosslingualCandidates(PageId orphan, std::string_view language,
                                          std::span<const LanguageGraph> graphs);

// Re-checks the candidate invariants against a snapshot: target is an orphan,
// source is a different article, and the edge does not exist yet.
bool IsValidCandidate(const CandidateLink &candidate, const LinkSnapshot &snapshot);

struct MethodCoverage {
  uint64_t n_with_ge1 = 0;
  uint64_t n_with_ge10 = 0;
};

struct CoverageReport {
  std::string language;
  uint64_t n_orphans = 0;
  // Distinct source articles over both methods.
  uint64_t n_with_ge1_candidate = 0;
  uint64_t n_with_ge10_candidates = 0;
  MethodCoverage findlink;
  MethodCoverage crosslingual;
};

// Counts orphans of `snapshot` by how many candidates they received.
// Candidates keyed by non-orphans are ignored.
CoverageReport ComputeCoverage(
    const LinkSnapshot &snapshot,
    const std::map<PageId, std::vector<CandidateLink>> &candidates);

// language, source_page_id, source_title, target_page_id, target_title,
// method, evidence, source_is_orphan. Findlink evidence is "begin-end" spans
// joined by ','; cross-lingual evidence is the vetting language codes.
void WriteCandidatesHeader(std::ostream &out);
void WriteCandidates(std::ostream &out, std::span<const CandidateLink> candidates,
                     const ArticleCatalog &catalog);

void WriteCoverageHeader(std::ostream &out);
void WriteCoverage(std::ostream &out, const CoverageReport &report);

}  // namespace oatlas

#endif  // OATLAS_DEORPH_H_
