#pragma once

#include "dj/situation.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>

namespace dj {

enum class QueryKind { trump, support };

inline const char* to_string(QueryKind k) { return k == QueryKind::trump ? "trump" : "support"; }

/// trump: (s2, s1) asks whether s2 trumps s1; support: (s, t) asks whether s supports t.
struct Query
{
    QueryKind kind;
    std::size_t first;
    std::size_t second;

    friend bool operator==(const Query&, const Query&) = default;
};

struct QueryRecord
{
    Query query;
    bool yes = false;
    std::optional<std::size_t> perspective; // the perspective that answered, when known

    friend bool operator==(const QueryRecord&, const QueryRecord&) = default;
};

enum class AgentPolicy { fixed, cyclic, drift };

inline const char* to_string(AgentPolicy p)
{
    switch (p) {
    case AgentPolicy::fixed: return "static";
    case AgentPolicy::cyclic: return "cyclic";
    case AgentPolicy::drift: return "drift";
    }
    return "?";
}

inline std::optional<AgentPolicy> parse_policy(std::string_view s)
{
    if (s == "static")
        return AgentPolicy::fixed;
    if (s == "cyclic")
        return AgentPolicy::cyclic;
    if (s == "drift")
        return AgentPolicy::drift;
    return std::nullopt;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace detail

/// A simulated individual answering from its current perspective.
///
/// After every query (support queries included) the policy picks the next
/// perspective: `fixed` keeps it, `cyclic` moves to the next one in canonical
/// order, `drift` jumps to a perspective determined by (seed, query count).
class Agent
{
public:
    Agent(Situation sit, AgentPolicy policy, std::uint64_t seed = 0, std::size_t initial = 0)
        : _sit(std::move(sit)), _policy(policy), _seed(seed)
    {
        if (!_sit.has_perspectives())
            throw std::invalid_argument("a simulated agent needs the perspective encoding");
        reset(initial);
    }

    [[nodiscard]] const Situation& situation() const { return _sit; }
    [[nodiscard]] AgentPolicy policy() const { return _policy; }
    [[nodiscard]] std::uint64_t seed() const { return _seed; }
    [[nodiscard]] std::size_t current() const { return _current; }
    [[nodiscard]] std::uint64_t query_count() const { return _count; }

    QueryRecord ask(const Query& q)
    {
        QueryRecord r{q, false, _current};
        if (q.kind == QueryKind::trump) {
            check_arg(q.first);
            check_arg(q.second);
            r.yes = _sit.perspective(_current).contains(q.first, q.second);
        } else {
            check_arg(q.first);
            if (q.second >= _sit.prop_count())
                throw std::out_of_range("unknown proposition index");
            r.yes = _sit.support().contains(q.first, q.second);
        }
        advance();
        return r;
    }

    QueryRecord ask_trump(std::size_t s2, std::size_t s1) { return ask({QueryKind::trump, s2, s1}); }
    QueryRecord ask_support(std::size_t s, std::size_t t) { return ask({QueryKind::support, s, t}); }

    QueryRecord ask_trump(std::string_view s2, std::string_view s1) { return ask_trump(_sit.arg(s2), _sit.arg(s1)); }
    QueryRecord ask_support(std::string_view s, std::string_view t) { return ask_support(_sit.arg(s), _sit.prop(t)); }

    void reset(std::size_t perspective)
    {
        if (perspective >= _sit.perspective_count())
            throw std::out_of_range("unknown perspective index");
        _current = perspective;
        _count = 0;
    }

    void reset(std::string_view perspective)
    {
        auto p = _sit.find_perspective(perspective);
        if (!p)
            throw UnknownIdentifier("perspective", perspective);
        reset(*p);
    }

private:
    void check_arg(std::size_t a) const
    {
        if (a >= _sit.arg_count())
            throw std::out_of_range("unknown argument index");
    }

    void advance()
    {
        ++_count;
        const auto n = _sit.perspective_count();
        switch (_policy) {
        case AgentPolicy::fixed: break;
        case AgentPolicy::cyclic: _current = (_current + 1) % n; break;
        case AgentPolicy::drift: _current = detail::splitmix64(_seed ^ detail::splitmix64(_count)) % n; break;
        }
    }

    Situation _sit;
    AgentPolicy _policy;
    std::uint64_t _seed;
    std::size_t _current = 0;
    std::uint64_t _count = 0;
};

} // namespace dj
