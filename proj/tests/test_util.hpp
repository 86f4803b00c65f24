#pragma once

#include <vector>

#include "hqlab/numkernel.hpp"
#include "oracles.hpp"

namespace testutil {

inline hqlab::Mat to_mat(const oracle::Dense& d) {
  const std::size_t r = d.size();
  const std::size_t c = r ? d[0].size() : 0;
  std::vector<double> e;
  for (const auto& row : d) e.insert(e.end(), row.begin(), row.end());
  return hqlab::Mat(r, c, std::move(e));
}

inline oracle::Dense to_dense(const hqlab::Mat& m) {
  oracle::Dense d(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) d[i][j] = m(i, j);
  return d;
}

}  // namespace testutil
