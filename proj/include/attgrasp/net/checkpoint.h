#ifndef ATTGRASP_NET_CHECKPOINT_H_
#define ATTGRASP_NET_CHECKPOINT_H_

#include <string>

#include "attgrasp/net/model.h"

namespace attgrasp::net {

// Checkpoint layout: <dir>/manifest.json describing parameter-group names,
// shapes, the model configuration, the vocabulary snapshot and training-phase
// metadata, plus <dir>/params.bin with the little-endian float32 tensors
// concatenated in manifest order.
void save_checkpoint(const Model& model, const std::string& dir,
                     const std::string& phase, const std::string& meta_json = "{}");

Model load_checkpoint(const std::string& dir);

std::string checkpoint_phase(const std::string& dir);

}  // namespace attgrasp::net

#endif  // ATTGRASP_NET_CHECKPOINT_H_
