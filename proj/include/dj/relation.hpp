#pragma once

#include <boost/dynamic_bitset.hpp>

#include <cstddef>
#include <utility>
#include <vector>

namespace dj {

/// Set of indices into a canonically ordered identifier table.
using IdSet = boost::dynamic_bitset<>;

inline IdSet make_set(std::size_t universe, std::initializer_list<std::size_t> members = {})
{
    IdSet s(universe);
    for (auto m : members)
        s.set(m);
    return s;
}

inline IdSet full_set(std::size_t universe)
{
    IdSet s(universe);
    s.set();
    return s;
}

inline std::vector<std::size_t> members(const IdSet& s)
{
    std::vector<std::size_t> out;
    out.reserve(s.count());
    for (auto i = s.find_first(); i != IdSet::npos; i = s.find_next(i))
        out.push_back(i);
    return out;
}

template <typename F>
void for_each_member(const IdSet& s, F&& f)
{
    for (auto i = s.find_first(); i != IdSet::npos; i = s.find_next(i))
        f(i);
}

/// Finite binary relation between [0, rows) and [0, cols).
///
/// Both the forward image of every row and the preimage of every column are
/// stored, so image and preimage lookups are O(1). For a relation R and an
/// element x, `image(x)` is {y : x R y} and `preimage(y)` is {x : x R y}.
class Relation
{
public:
    Relation() = default;

    Relation(std::size_t rows, std::size_t cols)
        : _fwd(rows, IdSet(cols)), _bwd(cols, IdSet(rows))
    {
    }

    [[nodiscard]] std::size_t rows() const { return _fwd.size(); }
    [[nodiscard]] std::size_t cols() const { return _bwd.size(); }

    void insert(std::size_t a, std::size_t b)
    {
        _fwd[a].set(b);
        _bwd[b].set(a);
    }

    void erase(std::size_t a, std::size_t b)
    {
        _fwd[a].reset(b);
        _bwd[b].reset(a);
    }

    [[nodiscard]] bool contains(std::size_t a, std::size_t b) const { return _fwd[a].test(b); }

    [[nodiscard]] const IdSet& image(std::size_t a) const { return _fwd[a]; }
    [[nodiscard]] const IdSet& preimage(std::size_t b) const { return _bwd[b]; }

    [[nodiscard]] IdSet image(const IdSet& from) const
    {
        IdSet out(cols());
        for_each_member(from, [&](std::size_t a) { out |= _fwd[a]; });
        return out;
    }

    [[nodiscard]] IdSet preimage(const IdSet& to) const
    {
        IdSet out(rows());
        for_each_member(to, [&](std::size_t b) { out |= _bwd[b]; });
        return out;
    }

    [[nodiscard]] bool empty() const
    {
        for (const auto& row : _fwd)
            if (row.any())
                return false;
        return true;
    }

    [[nodiscard]] std::size_t size() const
    {
        std::size_t n = 0;
        for (const auto& row : _fwd)
            n += row.count();
        return n;
    }

    [[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> pairs() const
    {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (std::size_t a = 0; a < rows(); ++a)
            for_each_member(_fwd[a], [&](std::size_t b) { out.emplace_back(a, b); });
        return out;
    }

    [[nodiscard]] Relation complement() const
    {
        Relation out(rows(), cols());
        for (std::size_t a = 0; a < rows(); ++a)
            for (std::size_t b = 0; b < cols(); ++b)
                if (!contains(a, b))
                    out.insert(a, b);
        return out;
    }

    /// Restriction to rows in `r` and columns in `c`.
    [[nodiscard]] Relation restrict(const IdSet& r, const IdSet& c) const
    {
        Relation out(rows(), cols());
        for_each_member(r, [&](std::size_t a) {
            for_each_member(_fwd[a] & c, [&](std::size_t b) { out.insert(a, b); });
        });
        return out;
    }

    Relation& operator|=(const Relation& other)
    {
        for (std::size_t a = 0; a < rows(); ++a) {
            _fwd[a] |= other._fwd[a];
        }
        for (std::size_t b = 0; b < cols(); ++b)
            _bwd[b] |= other._bwd[b];
        return *this;
    }

    Relation& operator&=(const Relation& other)
    {
        for (std::size_t a = 0; a < rows(); ++a)
            _fwd[a] &= other._fwd[a];
        for (std::size_t b = 0; b < cols(); ++b)
            _bwd[b] &= other._bwd[b];
        return *this;
    }

    [[nodiscard]] bool is_subset_of(const Relation& other) const
    {
        for (std::size_t a = 0; a < rows(); ++a)
            if (!_fwd[a].is_subset_of(other._fwd[a]))
                return false;
        return true;
    }

    friend bool operator==(const Relation& x, const Relation& y) { return x._fwd == y._fwd; }

private:
    std::vector<IdSet> _fwd;
    std::vector<IdSet> _bwd;
};

inline Relation operator|(Relation x, const Relation& y) { return x |= y; }
inline Relation operator&(Relation x, const Relation& y) { return x &= y; }

/// Path composition: x (first ; second) z iff x first y and y second z for some y.
inline Relation then(const Relation& first, const Relation& second)
{
    Relation out(first.rows(), second.cols());
    for (std::size_t a = 0; a < first.rows(); ++a) {
        IdSet reach(second.cols());
        for_each_member(first.image(a), [&](std::size_t b) { reach |= second.image(b); });
        for_each_member(reach, [&](std::size_t c) { out.insert(a, c); });
    }
    return out;
}

/// True iff the relation, read as a directed graph over one universe, has a cycle.
inline bool has_cycle(const Relation& r)
{
    const std::size_t n = r.rows();
    std::vector<std::size_t> indegree(n);
    for (std::size_t b = 0; b < n; ++b)
        indegree[b] = r.preimage(b).count();
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < n; ++v)
        if (indegree[v] == 0)
            ready.push_back(v);
    std::size_t seen = 0;
    while (!ready.empty()) {
        auto v = ready.back();
        ready.pop_back();
        ++seen;
        for_each_member(r.image(v), [&](std::size_t w) {
            if (--indegree[w] == 0)
                ready.push_back(w);
        });
    }
    return seen != n;
}

} // namespace dj
