#pragma once

#include <string>

#include "bns/simulate.hpp"

namespace bns {

// one row per node per path; requires a full-mode ensemble
std::string ensemble_to_csv(const SimEnsemble& ensemble);

// Columnar binary layout, little-endian doubles:
//   bytes 0..15   magic "BNSENSBL" + 8 zero bytes
//   u64 n_paths, u64 n_nodes
//   times[n_nodes]
//   x[path][node], sigma_sq[path][node], s[path][node] (each contiguous)
void write_ensemble_binary(const SimEnsemble& ensemble, const std::string& path);

struct BinaryEnsemble {
  std::vector<double> times;
  std::vector<std::vector<double>> x, sigma_sq, s;  // [path][node]
};

BinaryEnsemble read_ensemble_binary(const std::string& path);

}  // namespace bns
