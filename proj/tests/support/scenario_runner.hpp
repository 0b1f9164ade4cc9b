#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "vqloc/config.hpp"
#include "vqloc/localize.hpp"
#include "vqloc/metrics.hpp"
#include "vqloc/synthetic.hpp"
#include "vqloc/token_set.hpp"

namespace vqloc::testing {

/// A synthetic video tokenized with the synthetic backends.
struct PreparedScenario {
    std::shared_ptr<const SyntheticWorld> world;
    Backends backends;
    VideoTokenSet tokens;

    const SyntheticScenario& scenario() const { return world->scenario(); }
    std::vector<Annotation> annotations() const;
};

PreparedScenario prepare(std::uint64_t seed, const SyntheticParams& params, int threads = 1);

/// Localizes every query of the scenario.
std::vector<QueryResult> run_queries(const PreparedScenario& s, const EngineConfig& config);

}  // namespace vqloc::testing
