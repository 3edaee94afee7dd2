#ifndef OATLAS_PIPELINE_H_
#define OATLAS_PIPELINE_H_

#include <ostream>
#include <string_view>

#include "oatlas/config.h"

namespace oatlas {

// Output layout under RunConfig::out:
//   manifest.tsv
//   snapshots/<lang>/<YYYY-MM>.oatl, snapshots/<lang>/<YYYY-MM>.catalog.tsv
//   wiki_summary.tsv, orphan_totals.tsv, lowess_curve.tsv, orphans.tsv,
//   deorph_rates.tsv, added_indegree_cdf.tsv
//   representation_scores.tsv
//   pairs.tsv, panel.tsv
//   estimates.json
//   candidates.tsv, coverage.tsv
//
// Stages after ingest read the manifest and the persisted snapshots, so they
// can be rerun independently. Reports describe the latest ingested month.

enum class Stage {
  kIngest,
  kOrphans,
  kCharacterize,
  kPanel,
  kDid,
  kCandidates,
  kAll,
};

std::string_view StageName(Stage stage);

void RunIngest(const RunConfig &config, std::ostream &log);
void RunOrphans(const RunConfig &config, std::ostream &log);
void RunCharacterize(const RunConfig &config, std::ostream &log);
void RunPanel(const RunConfig &config, std::ostream &log);
// Throws DataError (after writing estimates.json) when there are no pairs.
void RunDid(const RunConfig &config, std::ostream &log);
void RunCandidates(const RunConfig &config, std::ostream &log);

// kAll runs every stage in order, fitting the models last.
void RunStage(Stage stage, const RunConfig &config, std::ostream &log);

}  // namespace oatlas

#endif  // OATLAS_PIPELINE_H_
