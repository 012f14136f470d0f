#pragma once
#include "curvlab/config.hpp"
#include "curvlab/report.hpp"

namespace curvlab {

// executes one subcommand; artifacts are left to the caller (write_artifacts)
RunReport run(const RunConfig& config);

}  // namespace curvlab
