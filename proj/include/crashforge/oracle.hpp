#pragma once

#include "crashforge/doe.hpp"
#include "crashforge/metrics.hpp"

namespace crashforge::crashsim {

// Closed-form reference equations for the four targets over the design
// features a = n_layers, b = thickness (mm), c = layer temperature (C),
// d = tool temperature (C):
//   CLE   = (-297024 + 2184c + 273d - 272a^2 + 2ca^2) / (490(-1088 + 8c + d))
//   EA    = 1303 + 8a^2 b^3 (-33 + (3 + a)ba)
//   Intr  = -0.692ab + 0.390a + 1.819b + 17.116
//   Decel = 136.585a - 1874.219b + 10032
// Serves as the ground-truth generator for exercising the ML and
// symbolic-regression stages without running the physics model.
// Throws SingularInput when 8c + d = 1088 (the CLE pole).
metrics::CrashMetrics reference_oracle(const doe::DesignPoint& p);

}  // namespace crashforge::crashsim
