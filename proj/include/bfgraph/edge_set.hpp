#pragma once

#include <cstdint>
#include <vector>

namespace bfgraph {

/// Open-addressing membership index over present edges, keyed by the
/// unordered pair (u < v) packed into 64 bits. No per-edge retrieval.
class EdgeSet {
public:
    explicit EdgeSet(std::size_t expected = 16) { rehash(capacity_for(expected)); }

    std::size_t size() const noexcept { return size_; }

    bool contains(std::uint32_t u, std::uint32_t v) const noexcept {
        const std::uint64_t key = pack(u, v);
        for (std::size_t i = slot(key);; i = (i + 1) & mask_) {
            if (slots_[i] == 0) return false;
            if (slots_[i] == key) return true;
        }
    }

    /// Returns false when the edge was already present.
    bool insert(std::uint32_t u, std::uint32_t v) {
        if (2 * (size_ + 1) > slots_.size()) rehash(slots_.size() * 2);
        return insert_key(pack(u, v));
    }

private:
    static std::uint64_t pack(std::uint32_t u, std::uint32_t v) noexcept {
        if (u > v) std::swap(u, v);
        // +1 keeps 0 free as the empty marker
        return ((static_cast<std::uint64_t>(u) << 32) | v) + 1;
    }

    static std::size_t capacity_for(std::size_t n) noexcept {
        std::size_t c = 16;
        while (c < 2 * n) c <<= 1;
        return c;
    }

    std::size_t slot(std::uint64_t key) const noexcept {
        return static_cast<std::size_t>((key * 0x9e3779b97f4a7c15ULL) >> shift_);
    }

    bool insert_key(std::uint64_t key) {
        for (std::size_t i = slot(key);; i = (i + 1) & mask_) {
            if (slots_[i] == key) return false;
            if (slots_[i] == 0) {
                slots_[i] = key;
                ++size_;
                return true;
            }
        }
    }

    void rehash(std::size_t capacity) {
        std::vector<std::uint64_t> old;
        old.swap(slots_);
        slots_.assign(capacity, 0);
        mask_ = capacity - 1;
        shift_ = 64;
        for (std::size_t c = capacity; c > 1; c >>= 1) --shift_;
        size_ = 0;
        for (auto key : old)
            if (key != 0) insert_key(key);
    }

    std::vector<std::uint64_t> slots_;
    std::size_t mask_ = 0;
    int shift_ = 60;
    std::size_t size_ = 0;
};

} // namespace bfgraph
