#pragma once

#include <string>

#include "mixnet/pipeline.hpp"

namespace mixnet {

// Sparse edge list: source,target,weight,sign,layer_source,layer_target,
// edge_type (intra|inter). Weights use shortest round-trip decimals so a
// reimport reproduces them bit-exactly; an empty graph yields only the
// header line.
std::string edge_list_csv(const FitResult& f);

// GraphML with node attributes (kind, layer, community, excluded_reason)
// and edge attributes (weight, sign).
std::string graphml(const FitResult& f);

// DOT with edge penwidth proportional to weight and color encoding the
// sign (positive blue, negative red, undefined gray).
std::string dot(const FitResult& f);

}  // namespace mixnet
