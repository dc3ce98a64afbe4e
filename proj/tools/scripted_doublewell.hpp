#pragma once

// Scripted centers for the 2-d double-well picture in which three cuts
// discard all nine stationary points. Only the CLI and the tests use this;
// the library's cutting loop always takes its centers from a CenterRule.

#include <memory>
#include <string>
#include <vector>

#include "guiltycut/corpus.hpp"
#include "guiltycut/cutting.hpp"
#include "guiltycut/trace2d.hpp"

namespace guiltycut::scripted_doublewell {

inline constexpr double kRadius = 2.5;
inline constexpr double kEpsHat = 0.1;

inline Vector start() { return (Vector(2) << 1.1, -0.5).finished(); }

/// Each point lies strictly inside the region left by the cuts before it.
inline std::vector<Vector> scripted_centers() {
  return {(Vector(2) << -1.2, -1.2).finished(), (Vector(2) << 0.05, 0.12).finished()};
}

/// Replays a fixed list of centers, ignoring the region.
inline CenterRule scripted_rule(std::vector<Vector> centers) {
  auto list = std::make_shared<std::vector<Vector>>(std::move(centers));
  auto next = std::make_shared<std::size_t>(0);
  return [list, next](const LocalizationSet&, const Vector&) -> Vector {
    if (*next >= list->size()) throw ConfigurationError("scripted centers exhausted");
    return (*list)[(*next)++];
  };
}

/// The scripted trace on doublewell2d, certificate included.
inline Trace2d scripted_trace(std::uint64_t seed = 0) {
  const auto f = corpus_get("doublewell2d");
  const auto centers = scripted_centers();
  Rng rng(seed);
  return trace2d(*f, "doublewell2d", start(), static_cast<int>(centers.size()), kRadius, scripted_rule(centers),
                 f->lipschitz_g1(), kEpsHat, rng);
}

}  // namespace guiltycut::scripted_doublewell
