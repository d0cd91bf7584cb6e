#ifndef ATTGRASP_LEARN_DATASET_H_
#define ATTGRASP_LEARN_DATASET_H_

#include <string>
#include <vector>

#include "attgrasp/learn/episode.h"

namespace attgrasp::learn {

// Dataset directory layout:
//   <dir>/manifest.txt  one record per line, tab-separated:
//     id  query-text  angle,row,col  label  domain  paths  her-flag
//   <dir>/tensors/     raw float32 tensor files (u32 H,W,C header)
// Records sharing tensors (HER relabels) reference the same files. The query
// field is "-" when empty; paths are comma-separated and relative to <dir>,
// ordered rgb,depth,mask[,post_rgb,post_depth].
void write_dataset(const std::string& dir, const std::vector<EpisodeRecord>& records);

std::vector<EpisodeRecord> read_dataset(const std::string& dir);

}  // namespace attgrasp::learn

#endif  // ATTGRASP_LEARN_DATASET_H_
