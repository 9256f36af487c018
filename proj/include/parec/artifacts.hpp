#pragma once

#include <string>

#include <Eigen/Core>

#include "parec/basis.hpp"
#include "parec/config.hpp"
#include "parec/forward.hpp"
#include "parec/grid.hpp"
#include "parec/inversion.hpp"

namespace parec {

/// `x,y,value` rows (17 significant digits), nodes in row-major (i, j) order.
void write_grid_csv(const std::string& path, const SpatialGrid& grid,
                    const Eigen::MatrixXd& field);

/// `edge,i,j,t,f,g` rows for every boundary node and quadrature time.
void write_cauchy_csv(const std::string& path, const SpatialGrid& grid, const TimeBasis& basis,
                      const CauchyRecord& record);

/// Standard run artifacts in `dir`: p_true.csv, p_iter_<k>.csv (k = 0..K),
/// recursive_error.csv, metrics.json and config_echo.json. Deterministic
/// byte-for-byte under a fixed config and seed.
void write_run_artifacts(const std::string& dir, const RunConfig& cfg,
                         const ReconstructionResult& result);

}  // namespace parec
