#include "fixtures.hpp"

#include <fstream>

#include "evochain/error.hpp"
#include "evochain/metrics.hpp"
#include "evochain/random.hpp"

namespace evochain::fixtures {

Dataset separable(std::size_t rows, std::size_t classes, std::size_t informative, std::size_t noise,
                  std::uint64_t seed) {
  Rng rng(seed);
  Dataset d;
  for (std::size_t f = 0; f < informative + noise; ++f) {
    d.features.push_back({(f < informative ? "signal" : "noise") + std::to_string(f), FeatureKind::numeric, 0, {}});
  }
  for (std::size_t c = 0; c < classes; ++c) d.classes.push_back("c" + std::to_string(c));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t c = r % classes;
    std::vector<double> row;
    for (std::size_t f = 0; f < informative; ++f) row.push_back(static_cast<double>(c) + 0.8 * uniform01(rng));
    for (std::size_t f = 0; f < noise; ++f) row.push_back(static_cast<double>(classes) * uniform01(rng));
    d.rows.push_back(std::move(row));
    d.labels.push_back(c);
  }
  return d;
}

Dataset random_binary(std::size_t rows, std::size_t features, std::size_t classes, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d;
  for (std::size_t f = 0; f < features; ++f) d.features.push_back({"b" + std::to_string(f), FeatureKind::numeric, 0, {}});
  for (std::size_t c = 0; c < classes; ++c) d.classes.push_back("k" + std::to_string(c));
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<double> row;
    for (std::size_t f = 0; f < features; ++f) row.push_back(static_cast<double>(uniform_index(rng, 2)));
    d.rows.push_back(std::move(row));
    d.labels.push_back(uniform_index(rng, classes));
  }
  return d;
}

synth::Scenario shipped_scenario(const std::string& file) {
  std::ifstream in(std::string(EVOCHAIN_CONFIG_DIR) + "/" + file);
  if (!in) throw ResourceError("cannot open scenario " + file);
  return synth::read_scenario(in);
}

synth::RecoveryScore ged_recovery(const synth::Generated& generated, const ged::Thresholds& thresholds,
                                  double epsilon) {
  std::vector<ged::Importance> importance;
  for (const auto& graph : generated.graphs) {
    importance.push_back(ged::importance_from_scores(graph, metrics::social_position(graph, epsilon)));
  }
  const auto detected = ged::detect_events(generated.communities, importance, thresholds);
  return synth::score_ged(generated.communities, generated.ged_truth, generated.communities, detected);
}

synth::RecoveryScore sgci_recovery(const synth::Generated& generated, const sgci::Parameters& params) {
  const auto detected = sgci::detect_events(generated.communities, params);
  return synth::score_sgci(generated.communities, generated.sgci_truth, generated.communities, detected.labels);
}

}  // namespace evochain::fixtures
