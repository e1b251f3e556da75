#pragma once

#include "bfgraph/graph_process.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <map>
#include <vector>

namespace oracles {

inline std::vector<std::uint64_t> size_multiset(bfgraph::ComponentForest& f) {
    std::vector<std::uint64_t> s;
    for (std::uint32_t v = 0; v < f.vertex_count(); ++v)
        if (f.is_root(v)) s.push_back(f.root_size(v));
    std::sort(s.begin(), s.end());
    return s;
}

struct ChiSquare {
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 0.0;
    bool support_ok = true;  // every observed outcome is possible
};

/// Component-size multisets of Erdos-Renyi on 6 vertices after 3 edges,
/// simulated vs exact enumeration of all ordered triples of distinct edges.
inline ChiSquare er_six_vertices_three_edges(int runs, std::uint64_t seed) {
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < 6; ++u)
        for (int v = u + 1; v < 6; ++v) edges.emplace_back(u, v);
    std::map<std::vector<std::uint64_t>, double> exact;
    double total = 0;
    for (std::size_t a = 0; a < edges.size(); ++a)
        for (std::size_t b = 0; b < edges.size(); ++b)
            for (std::size_t c = 0; c < edges.size(); ++c) {
                if (a == b || b == c || a == c) continue;
                bfgraph::ComponentForest f(6);
                for (auto i : {a, b, c}) f.link(edges[i].first, edges[i].second);
                exact[size_multiset(f)] += 1;
                total += 1;
            }
    std::map<std::vector<std::uint64_t>, double> observed;
    for (int r = 0; r < runs; ++r) {
        bfgraph::ProcessState p(6, bfgraph::ProcessRule::erdos_renyi(), bfgraph::mix_seed(seed, r));
        for (int k = 0; k < 3; ++k) p.step();
        observed[size_multiset(p.forest())] += 1;
    }
    ChiSquare out;
    for (const auto& [key, count] : exact) {
        const double e = runs * count / total;
        const double o = observed.count(key) ? observed[key] : 0.0;
        out.statistic += (o - e) * (o - e) / e;
    }
    for (const auto& kv : observed)
        if (!exact.count(kv.first)) out.support_ok = false;
    out.dof = static_cast<double>(exact.size() - 1);
    out.p_value = boost::math::gamma_q(out.dof / 2.0, out.statistic / 2.0);
    return out;
}

} // namespace oracles
