#pragma once

#include <cstddef>
#include <cstdint>

#include <string>

#include "evochain/dataset.hpp"
#include "evochain/synth.hpp"

namespace evochain::fixtures {

/// Balanced classes "c0", "c1", ... where each informative feature of a class
/// c row lies in [c, c + 0.8] and noise features are uniform in [0, classes].
Dataset separable(std::size_t rows, std::size_t classes, std::size_t informative, std::size_t noise,
                  std::uint64_t seed);

/// Random binary features with random labels from `classes` classes.
Dataset random_binary(std::size_t rows, std::size_t features, std::size_t classes, std::uint64_t seed);

/// Scenario file shipped in the repository's configs/ directory.
synth::Scenario shipped_scenario(const std::string& file);

/// Tracker output scored against the planted truth, using the planted
/// memberships directly as detected communities.
synth::RecoveryScore ged_recovery(const synth::Generated& generated, const ged::Thresholds& thresholds = {},
                                  double epsilon = 0.9);
synth::RecoveryScore sgci_recovery(const synth::Generated& generated, const sgci::Parameters& params = {});

}  // namespace evochain::fixtures
