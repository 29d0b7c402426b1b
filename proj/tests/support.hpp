#pragma once

#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <string>

namespace testing {

// Every PLS fit in the unit suites goes through here.
template <typename DerivedX, typename DerivedY>
auto pls(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y, Eigen::Index k,
         const geoaffect::PlsOptions& options = {}) {
  bool orthogonal = false;
  auto model = oracle::checked_fit_pls(x, y, k, options, &orthogonal);
  CHECK_MESSAGE(orthogonal, "score orthogonality violated for k=" << k);
  return model;
}

inline void check_orthogonal(const geoaffect::PlsModel<double>& model, const Eigen::MatrixXd& x) {
  CHECK_MESSAGE(oracle::check_scores(model, x), "score orthogonality violated");
}

// Fresh scratch directory per test case.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("geoaffect_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
