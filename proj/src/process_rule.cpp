#include "bfgraph/process_rule.hpp"

#include "bfgraph/error.hpp"

#include <charconv>

namespace bfgraph {

namespace {

std::vector<Choice> cutoff_table(int cutoff) {
    const int b = cutoff + 1;
    std::vector<Choice> table(static_cast<std::size_t>(b) * b * b * b, Choice::second);
    for (int c1 = 1; c1 <= b; ++c1)
        for (int c2 = 1; c2 <= b; ++c2)
            for (int c3 = 1; c3 <= b; ++c3)
                for (int c4 = 1; c4 <= b; ++c4) {
                    const auto idx = static_cast<std::size_t>((((c1 - 1) * b + (c2 - 1)) * b + (c3 - 1)) * b + (c4 - 1));
                    table[idx] = (c1 <= cutoff && c2 <= cutoff) ? Choice::first : Choice::second;
                }
    return table;
}

} // namespace

ProcessRule ProcessRule::erdos_renyi() {
    return ProcessRule(RuleKind::erdos_renyi, 1, std::vector<Choice>(16, Choice::first));
}

ProcessRule ProcessRule::bohman_frieze() {
    return ProcessRule(RuleKind::bohman_frieze, 1, cutoff_table(1));
}

ProcessRule ProcessRule::bounded_size(int cutoff) {
    if (cutoff < 1) fail(ErrorKind::invalid_argument, "bounded-size cutoff must be >= 1");
    return ProcessRule(RuleKind::bounded_size, cutoff, cutoff_table(cutoff));
}

ProcessRule ProcessRule::bounded_size(int cutoff, std::vector<Choice> table) {
    if (cutoff < 1) fail(ErrorKind::invalid_argument, "bounded-size cutoff must be >= 1");
    const auto b = static_cast<std::size_t>(cutoff + 1);
    if (table.size() != b * b * b * b)
        fail(ErrorKind::invalid_argument,
             "decision table for K=" + std::to_string(cutoff) + " needs " + std::to_string(b * b * b * b) + " entries");
    return ProcessRule(RuleKind::bounded_size, cutoff, std::move(table));
}

ProcessRule ProcessRule::parse(std::string_view text) {
    if (text == "er") return erdos_renyi();
    if (text == "bf") return bohman_frieze();
    constexpr std::string_view prefix = "bounded:";
    if (text.substr(0, prefix.size()) == prefix) {
        auto digits = text.substr(prefix.size());
        int k = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
        if (ec != std::errc{} || ptr != digits.data() + digits.size() || k < 1 || k > 64)
            fail(ErrorKind::invalid_argument, "bad bounded-size cutoff in rule '" + std::string(text) + "'");
        return bounded_size(k);
    }
    fail(ErrorKind::invalid_argument, "unknown rule '" + std::string(text) + "' (expected er|bf|bounded:K)");
}

std::string ProcessRule::name() const {
    switch (kind_) {
    case RuleKind::erdos_renyi: return "er";
    case RuleKind::bohman_frieze: return "bf";
    case RuleKind::bounded_size: return "bounded:" + std::to_string(cutoff_);
    }
    return "?";
}

bool ProcessRule::is_bohman_frieze_equivalent() const {
    if (kind_ == RuleKind::bohman_frieze) return true;
    if (kind_ == RuleKind::erdos_renyi) return false;
    const int b = cutoff_ + 1;
    for (int c1 = 1; c1 <= b; ++c1)
        for (int c2 = 1; c2 <= b; ++c2)
            for (int c3 = 1; c3 <= b; ++c3)
                for (int c4 = 1; c4 <= b; ++c4) {
                    const Choice want = (c1 == 1 && c2 == 1) ? Choice::first : Choice::second;
                    if (decide(c1, c2, c3, c4) != want) return false;
                }
    return true;
}

} // namespace bfgraph
