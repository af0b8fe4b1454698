#ifndef PUCCI_FORGE_JET_CACHE_HPP
#define PUCCI_FORGE_JET_CACHE_HPP

#include <string>

#include "pucci_forge/operator_reconstruction.hpp"

namespace pucci {

/// Binary jet-sample file; layout in docs/jet_cache.md. All numbers are
/// little-endian whatever the host order.
inline constexpr char kJetCacheMagic[8] = {'P', 'F', 'J', 'E', 'T', 'S', '0', '1'};

/// Throws std::runtime_error when the file cannot be written.
void save_sample(const std::string& path, const JetSample& sample);

/// Throws std::runtime_error on I/O failure, a bad magic, a truncated body or
/// a candidate (id, alpha, dim) different from `expected`.
JetSample load_sample(const std::string& path, const CandidateSpec& expected);

/// Loads `path` when it holds a sample of `c` with `count` points, otherwise
/// builds a fresh sample and writes it there. An empty path never touches disk.
JetSample cached_sample(const std::string& path, const CandidateSpec& c, int count, double exclusion);

}  // namespace pucci

#endif  // PUCCI_FORGE_JET_CACHE_HPP
