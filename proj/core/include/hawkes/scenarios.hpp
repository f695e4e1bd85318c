#pragma once

#include "hawkes/model.hpp"

namespace hawkes {

// Support length shared by every reference scenario (seconds).
inline constexpr double kScenarioSupport = 0.04;
inline constexpr double kScenarioNu = 20.0;

// K = 2, step interactions:
//   h_{1,1} = 30 on (0, 0.02], h_{2,1} = 30 on (0, 0.01],
//   h_{1,2} = 30 on (0.01, 0.02], h_{2,2} = 0.
HawkesModel scenario1();

// K = 8, three independent groups; nine edges 30 on (0, 0.02]:
//   2->1, 3->1, 2->2, 1->3, 2->3, 8->5, 5->6, 6->7, 7->8  (source->target, 1-based).
HawkesModel scenario2();

// K = 2, smooth interactions:
//   h_{1,1} = 100 exp(-100 t), h_{2,1} = 30 on (0, 0.02],
//   h_{1,2} = 0.5 * N(t; 0.02, 0.004^2), h_{2,2} = 0.
// Note: as specified this model has spectral radius ~1.226 and is not stationary.
HawkesModel scenario3();

// Throws ConfigError for ids other than 1, 2, 3.
HawkesModel scenario(int id);

}  // namespace hawkes
