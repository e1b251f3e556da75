#include "bfgraph/component_forest.hpp"

#include <numeric>

namespace bfgraph {

ComponentForest::ComponentForest(std::uint32_t n, std::uint32_t track_limit)
    : n_(n), track_limit_(track_limit < 1 ? 1 : track_limit), components_(n), sum_squares_(n),
      parent_(n), size_(n, 1), edges_(n, 0), histogram_(static_cast<std::size_t>(track_limit_) + 1, 0) {
    std::iota(parent_.begin(), parent_.end(), 0u);
    histogram_[1] = n;
}

void ComponentForest::add_size(std::uint32_t s) {
    if (s <= track_limit_) ++histogram_[s];
    else ++large_[s];
    if (s > max_size_) max_size_ = s;
}

void ComponentForest::remove_size(std::uint32_t s) {
    if (s <= track_limit_) {
        --histogram_[s];
        return;
    }
    auto it = large_.find(s);
    if (--it->second == 0) large_.erase(it);
}

LinkResult ComponentForest::link(std::uint32_t u, std::uint32_t v) {
    ++m_;
    std::uint32_t a = find(u);
    std::uint32_t b = find(v);
    if (a == b) {
        ++edges_[a];
        return {false, a, classify(size_[a], edges_[a])};
    }
    if (size_[a] < size_[b] || (size_[a] == size_[b] && b < a)) std::swap(a, b);
    const std::uint64_t sa = size_[a];
    const std::uint64_t sb = size_[b];
    remove_size(size_[a]);
    remove_size(size_[b]);
    parent_[b] = a;
    size_[a] += size_[b];
    edges_[a] += edges_[b] + 1;
    add_size(size_[a]);
    --components_;
    sum_squares_ += 2 * sa * sb;
    return {true, a, classify(size_[a], edges_[a])};
}

std::uint64_t ComponentForest::components_of_size(std::uint64_t size) const {
    if (size == 0) return 0;
    if (size <= track_limit_) return histogram_[size];
    auto it = large_.find(static_cast<std::uint32_t>(size));
    return it == large_.end() ? 0 : it->second;
}

std::pair<std::uint64_t, std::uint64_t> ComponentForest::largest_two() const {
    std::uint64_t first = 0, second = 0;
    auto take = [&](std::uint64_t s, std::uint64_t count) {
        for (std::uint64_t k = 0; k < count && k < 2; ++k) {
            if (s > first) {
                second = first;
                first = s;
            } else if (s > second) {
                second = s;
            }
        }
    };
    for (auto it = large_.rbegin(); it != large_.rend() && second == 0; ++it) take(it->first, it->second);
    if (second == 0) {
        const std::uint32_t top = max_size_ < track_limit_ ? max_size_ : track_limit_;
        for (std::uint32_t s = top; s >= 1 && second == 0; --s)
            if (histogram_[s] != 0) take(s, histogram_[s]);
    }
    return {first, second};
}

} // namespace bfgraph
