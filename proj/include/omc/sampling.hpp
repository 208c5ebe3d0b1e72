#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "omc/model.hpp"

namespace omc {

// Uniform i.i.d. entry oracle (with replacement). One draw = one (i, j)
// cell, i and j in fixed order, so a replay with the same master seed and
// stream index reproduces the sequence exactly.
class EntrySampler {
 public:
  EntrySampler(std::uint64_t master_seed, std::uint64_t stream_index, int d1,
               int d2);

  std::pair<int, int> next_ij();
  Entry next_entry(const GroundTruth& gt);

  // m i.i.d. observations of gt (duplicates allowed). m >= 1.
  std::vector<Entry> sample_init_set(const GroundTruth& gt, long long m);

  int d1() const { return d1_; }
  int d2() const { return d2_; }

 private:
  Rng rng_;
  int d1_;
  int d2_;
};

}  // namespace omc
