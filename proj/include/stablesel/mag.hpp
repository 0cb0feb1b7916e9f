#pragma once

#include <set>
#include <string>

#include "stablesel/graph.hpp"

namespace stablesel {

// Split of the non-target vertices for a latent projection.
struct Projection {
  std::set<std::string> observed;
  std::set<std::string> latent;
  std::set<std::string> selection;
};

// Reflexive closure of `base` under: if (u, w) has a tail mark at u and w is
// already in the closure, add u. Covers both u -> w and u -- w edges.
std::set<std::string> anterior(const MixedGraph& g, const std::set<std::string>& base);

// True when a simple path from a to b exists whose interior colliders are all
// anterior to {a, b} union selection and whose interior non-colliders all lie
// in `latent`.
bool has_inducing_path(const MixedGraph& g, const std::string& a, const std::string& b,
                       const std::set<std::string>& selection,
                       const std::set<std::string>& latent);

// Maximal ancestral graph over proj.observed plus the target, preserving all
// separation statements of `source` among those vertices given the selection
// set. Accepts dag and mag sources.
MixedGraph build_mag(const MixedGraph& source, const std::string& target,
                     const Projection& proj);

}  // namespace stablesel
