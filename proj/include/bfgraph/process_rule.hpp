#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bfgraph {

enum class RuleKind { erdos_renyi, bohman_frieze, bounded_size };

enum class Choice : std::uint8_t { first = 0, second = 1 };

/// Edge-selection rule of an Achlioptas process.
///
/// A bounded-size rule sees only the capped sizes of the four candidate
/// endpoints, cap(s) = min(s, K+1), with K+1 standing for "large". The
/// decision table is indexed by (cap(e1.u), cap(e1.v), cap(e2.u), cap(e2.v))
/// in row-major order, each coordinate running over 1..K+1.
class ProcessRule {
public:
    static ProcessRule erdos_renyi();
    static ProcessRule bohman_frieze();
    /// K-cutoff rule: add e1 iff both of its endpoints lie in components of size <= K.
    static ProcessRule bounded_size(int cutoff);
    static ProcessRule bounded_size(int cutoff, std::vector<Choice> table);
    /// The Bohman-Frieze rule written as a K=1 bounded-size table.
    static ProcessRule bohman_frieze_table() { return bounded_size(1); }

    /// Accepts "er", "bf" and "bounded:K".
    static ProcessRule parse(std::string_view text);

    RuleKind kind() const noexcept { return kind_; }
    int cutoff() const noexcept { return cutoff_; }
    const std::vector<Choice>& table() const noexcept { return table_; }
    std::string name() const;

    int cap(std::uint64_t size) const noexcept {
        return size > static_cast<std::uint64_t>(cutoff_) ? cutoff_ + 1 : static_cast<int>(size);
    }

    /// Table lookup on capped sizes, each in 1..K+1.
    Choice decide(int c1, int c2, int c3, int c4) const noexcept {
        const int b = cutoff_ + 1;
        return table_[static_cast<std::size_t>((((c1 - 1) * b + (c2 - 1)) * b + (c3 - 1)) * b + (c4 - 1))];
    }

    /// True when the rule's decision coincides with Bohman-Frieze on every input.
    bool is_bohman_frieze_equivalent() const;

    friend bool operator==(const ProcessRule&, const ProcessRule&) = default;

private:
    ProcessRule(RuleKind kind, int cutoff, std::vector<Choice> table)
        : kind_(kind), cutoff_(cutoff), table_(std::move(table)) {}

    RuleKind kind_;
    int cutoff_;
    std::vector<Choice> table_;
};

} // namespace bfgraph
