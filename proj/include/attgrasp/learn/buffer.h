#ifndef ATTGRASP_LEARN_BUFFER_H_
#define ATTGRASP_LEARN_BUFFER_H_

#include <deque>
#include <vector>

#include "attgrasp/learn/episode.h"
#include "attgrasp/rng.h"

namespace attgrasp::learn {

// Bounded FIFO of episode records with uniform without-replacement batch
// sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {}

  void push(EpisodeRecord r) {
    buf_.push_back(std::move(r));
    if (buf_.size() > capacity_) buf_.pop_front();
  }

  size_t size() const { return buf_.size(); }
  size_t capacity() const { return capacity_; }
  const EpisodeRecord& at(size_t i) const { return buf_[i]; }

  std::vector<const EpisodeRecord*> sample_batch(Rng& rng, int n) const {
    std::vector<uint32_t> idx(buf_.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<uint32_t>(i);
    const size_t take = std::min(static_cast<size_t>(n), buf_.size());
    for (size_t i = 0; i < take; ++i) {
      size_t j = i + rng.next_u64() % (idx.size() - i);
      std::swap(idx[i], idx[j]);
    }
    std::vector<const EpisodeRecord*> out;
    out.reserve(take);
    for (size_t i = 0; i < take; ++i) out.push_back(&buf_[idx[i]]);
    return out;
  }

 private:
  size_t capacity_;
  std::deque<EpisodeRecord> buf_;
};

}  // namespace attgrasp::learn

#endif  // ATTGRASP_LEARN_BUFFER_H_
