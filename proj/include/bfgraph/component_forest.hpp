#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace bfgraph {

enum class ComponentClass : std::uint8_t { tree, unicyclic, complex };

constexpr ComponentClass classify(std::uint64_t size, std::uint64_t edges) noexcept {
    if (edges + 1 == size) return ComponentClass::tree;
    if (edges == size) return ComponentClass::unicyclic;
    return ComponentClass::complex;
}

struct LinkResult {
    bool merged = false;
    std::uint32_t root = 0;
    ComponentClass resulting_class = ComponentClass::tree;
};

/// Union-find over n vertices with per-root size and internal-edge counts,
/// plus an incrementally maintained size histogram.
///
/// Union by size, full path compression; on equal sizes the lower root index
/// becomes the parent. Sizes up to `track_limit` are histogrammed in a dense
/// array, larger ones in an exact ordered side map.
class ComponentForest {
public:
    explicit ComponentForest(std::uint32_t n, std::uint32_t track_limit = 2048);

    std::uint32_t vertex_count() const noexcept { return n_; }
    std::uint64_t edge_count() const noexcept { return m_; }
    std::uint64_t component_count() const noexcept { return components_; }
    std::uint64_t isolated_count() const noexcept { return histogram_[1]; }
    std::uint32_t track_limit() const noexcept { return track_limit_; }

    std::uint32_t find(std::uint32_t v) noexcept {
        std::uint32_t root = v;
        while (parent_[root] != root) root = parent_[root];
        while (parent_[v] != root) {
            const std::uint32_t next = parent_[v];
            parent_[v] = root;
            v = next;
        }
        return root;
    }

    std::uint32_t size_of(std::uint32_t v) noexcept { return size_[find(v)]; }

    /// Records edge {u, v}: merges two components or adds an internal edge.
    LinkResult link(std::uint32_t u, std::uint32_t v);

    bool is_root(std::uint32_t v) const noexcept { return parent_[v] == v; }
    std::uint32_t root_size(std::uint32_t root) const noexcept { return size_[root]; }
    std::uint64_t root_edges(std::uint32_t root) const noexcept { return edges_[root]; }

    /// Number of components of exactly this size.
    std::uint64_t components_of_size(std::uint64_t size) const;

    /// Σ_C |C|^2, exact.
    std::uint64_t sum_squares() const noexcept { return sum_squares_; }

    /// Visits (size, count) for every occupied size in increasing order.
    template <class F>
    void for_each_size(F&& f) const {
        for (std::uint32_t s = 1; s <= track_limit_ && s <= n_; ++s)
            if (histogram_[s] != 0) f(static_cast<std::uint64_t>(s), histogram_[s]);
        for (const auto& [s, c] : large_) f(static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(c));
    }

    /// Largest and second-largest component sizes (second is 0 with one component).
    std::pair<std::uint64_t, std::uint64_t> largest_two() const;

private:
    void add_size(std::uint32_t s);
    void remove_size(std::uint32_t s);

    std::uint32_t n_;
    std::uint32_t track_limit_;
    std::uint64_t m_ = 0;
    std::uint64_t components_;
    std::uint64_t sum_squares_;
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> size_;
    std::vector<std::uint32_t> edges_;
    std::vector<std::uint64_t> histogram_;
    std::map<std::uint32_t, std::uint32_t> large_;
    std::uint32_t max_size_ = 1;
};

} // namespace bfgraph
