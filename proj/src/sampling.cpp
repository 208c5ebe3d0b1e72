#include "omc/sampling.hpp"

#include "omc/errors.hpp"

namespace omc {

EntrySampler::EntrySampler(std::uint64_t master_seed,
                           std::uint64_t stream_index, int d1, int d2)
    : rng_(stream_seed(master_seed, stream_index)), d1_(d1), d2_(d2) {
  if (d1 < 1 || d2 < 1) throw ConfigError("EntrySampler: bad dimensions");
}

std::pair<int, int> EntrySampler::next_ij() {
  int i = rng_.next_index(d1_);
  int j = rng_.next_index(d2_);
  return {i, j};
}

Entry EntrySampler::next_entry(const GroundTruth& gt) {
  if (gt.d1 != d1_ || gt.d2 != d2_)
    throw ConfigError("EntrySampler: ground truth dimensions differ");
  auto [i, j] = next_ij();
  return Entry{i, j, entry(gt, i, j)};
}

std::vector<Entry> EntrySampler::sample_init_set(const GroundTruth& gt,
                                                 long long m) {
  if (m < 1) throw ConfigError("sample_init_set: m must be >= 1");
  std::vector<Entry> out;
  out.reserve(std::size_t(m));
  for (long long t = 0; t < m; ++t) out.push_back(next_entry(gt));
  return out;
}

}  // namespace omc
