#pragma once

#include <string>
#include <string_view>

#include "catnet/graph.hpp"

namespace catnet {

// {"nodes":[{"id","kind","label"}],"relations":[...],"edges":[[u,r,v],...]}
// Nodes by id, edges in canonical order, so equal graphs export to equal bytes.
std::string graph_to_json(const HeteroGraph& g);

// Returns a frozen graph. Throws DataError on malformed input or when node ids
// are not the contiguous range [0, N) in order.
HeteroGraph graph_from_json(std::string_view text);

}  // namespace catnet
