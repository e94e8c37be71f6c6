#pragma once

#include "dj/relation.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace dj {

using IdPair = std::pair<std::string, std::string>;

/// Trump relations given per perspective; a pair (a, b) reads "a trumps b".
struct PerspectiveEncoding
{
    std::map<std::string, std::vector<IdPair>> perspectives;

    friend bool operator==(const PerspectiveEncoding&, const PerspectiveEncoding&) = default;
};

/// Trump relations given directly: the pairs that trump in some perspective,
/// and the subset of those that also fail to trump in some perspective.
struct DirectEncoding
{
    std::vector<IdPair> trumps_exists;
    std::vector<IdPair> ambivalent;

    friend bool operator==(const DirectEncoding&, const DirectEncoding&) = default;
};

/// A decision situation as written by a user: identifier-level, unvalidated.
struct DecisionSituation
{
    std::vector<std::string> propositions;
    std::vector<std::string> arguments;
    std::vector<IdPair> support; // (argument, proposition)
    std::variant<PerspectiveEncoding, DirectEncoding> relations;

    friend bool operator==(const DecisionSituation&, const DecisionSituation&) = default;
};

struct ValidationReport
{
    std::vector<std::string> violations;

    [[nodiscard]] bool ok() const { return violations.empty(); }
};

class InvalidSituation : public std::runtime_error
{
public:
    explicit InvalidSituation(std::vector<std::string> violations)
        : std::runtime_error(join(violations)), _violations(std::move(violations))
    {
    }

    [[nodiscard]] const std::vector<std::string>& violations() const { return _violations; }

private:
    static std::string join(const std::vector<std::string>& v)
    {
        std::string out = "invalid decision situation";
        for (const auto& s : v)
            out += "; " + s;
        return out;
    }

    std::vector<std::string> _violations;
};

class UnknownIdentifier : public std::invalid_argument
{
public:
    UnknownIdentifier(std::string_view kind, std::string_view id)
        : std::invalid_argument("unknown " + std::string(kind) + " " + std::string(id))
    {
    }
};

inline ValidationReport validate_situation(const DecisionSituation& sit)
{
    ValidationReport report;
    auto& v = report.violations;

    std::set<std::string> args;
    std::set<std::string> props;
    for (const auto& a : sit.arguments) {
        if (a.empty())
            v.push_back("empty argument identifier");
        else if (!args.insert(a).second)
            v.push_back("duplicate argument " + a);
    }
    for (const auto& t : sit.propositions) {
        if (t.empty())
            v.push_back("empty proposition identifier");
        else if (!props.insert(t).second)
            v.push_back("duplicate proposition " + t);
    }
    for (const auto& a : args)
        if (props.contains(a))
            v.push_back("identifier " + a + " is both an argument and a proposition");

    for (const auto& [s, t] : sit.support) {
        if (!args.contains(s))
            v.push_back("unknown argument " + s + " in support");
        if (!props.contains(t))
            v.push_back("unknown proposition " + t + " in support");
    }

    auto check_trump_pairs = [&](const std::vector<IdPair>& pairs, const std::string& where) {
        for (const auto& [a, b] : pairs) {
            if (!args.contains(a))
                v.push_back("unknown argument " + a + " in " + where);
            if (!args.contains(b))
                v.push_back("unknown argument " + b + " in " + where);
            if (a == b)
                v.push_back("self-trump (" + a + ", " + a + ") in " + where);
        }
    };

    if (const auto* pe = std::get_if<PerspectiveEncoding>(&sit.relations)) {
        if (pe->perspectives.empty())
            v.push_back("perspective map is empty");
        for (const auto& [p, pairs] : pe->perspectives) {
            if (p.empty())
                v.push_back("empty perspective identifier");
            check_trump_pairs(pairs, "perspective " + p);
        }
    } else {
        const auto& de = std::get<DirectEncoding>(sit.relations);
        check_trump_pairs(de.trumps_exists, "trumps_exists");
        check_trump_pairs(de.ambivalent, "ambivalent");
        std::set<IdPair> exists(de.trumps_exists.begin(), de.trumps_exists.end());
        for (const auto& pr : de.ambivalent)
            if (!exists.contains(pr))
                v.push_back("ambivalent pair (" + pr.first + ", " + pr.second + ") not in trumps_exists");
    }
    return report;
}

namespace detail {

inline void sort_unique(std::vector<std::string>& v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

inline void sort_unique(std::vector<IdPair>& v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

} // namespace detail

/// Sorted, deduplicated copy; the form every serializer emits.
inline DecisionSituation canonicalize(DecisionSituation sit)
{
    detail::sort_unique(sit.propositions);
    detail::sort_unique(sit.arguments);
    detail::sort_unique(sit.support);
    std::visit(
        [](auto& enc) {
            using E = std::decay_t<decltype(enc)>;
            if constexpr (std::is_same_v<E, PerspectiveEncoding>) {
                for (auto& [p, pairs] : enc.perspectives)
                    detail::sort_unique(pairs);
            } else {
                detail::sort_unique(enc.trumps_exists);
                detail::sort_unique(enc.ambivalent);
            }
        },
        sit.relations);
    return sit;
}

/// The relations derived from the trump primitives.
struct DerivedRelations
{
    Relation trumps_exists;     // some perspective has a trumping b
    Relation not_trumps_exists; // some perspective has a not trumping b
    Relation trumps_forall;     // complement of not_trumps_exists
    Relation not_trumps_forall; // complement of trumps_exists
    IdSet decisive;             // arguments with empty trumps_exists preimage

    friend bool operator==(const DerivedRelations&, const DerivedRelations&) = default;
};

/// A validated decision situation with identifiers mapped to dense indices.
///
/// Arguments, propositions and perspectives are indexed in lexicographic
/// identifier order, so index order is the canonical "lowest identifier first"
/// order used throughout. Instances are immutable.
class Situation
{
public:
    explicit Situation(const DecisionSituation& input)
    {
        if (auto report = validate_situation(input); !report.ok())
            throw InvalidSituation(report.violations);

        _doc = canonicalize(input);
        _args = _doc.arguments;
        _props = _doc.propositions;
        for (std::size_t i = 0; i < _args.size(); ++i)
            _arg_index.emplace(_args[i], i);
        for (std::size_t i = 0; i < _props.size(); ++i)
            _prop_index.emplace(_props[i], i);

        const auto n = _args.size();
        _support = Relation(n, _props.size());
        for (const auto& [s, t] : _doc.support)
            _support.insert(arg(s), prop(t));

        DerivedRelations d;
        d.trumps_exists = Relation(n, n);
        if (const auto* pe = std::get_if<PerspectiveEncoding>(&_doc.relations)) {
            d.not_trumps_exists = Relation(n, n);
            for (const auto& [p, pairs] : pe->perspectives) {
                Relation rp(n, n);
                for (const auto& [a, b] : pairs)
                    rp.insert(arg(a), arg(b));
                d.trumps_exists |= rp;
                d.not_trumps_exists |= rp.complement();
                _perspective_names.push_back(p);
                _perspectives.push_back(std::move(rp));
            }
        } else {
            const auto& de = std::get<DirectEncoding>(_doc.relations);
            for (const auto& [a, b] : de.trumps_exists)
                d.trumps_exists.insert(arg(a), arg(b));
            d.not_trumps_exists = d.trumps_exists.complement();
            for (const auto& [a, b] : de.ambivalent)
                d.not_trumps_exists.insert(arg(a), arg(b));
        }
        d.trumps_forall = d.not_trumps_exists.complement();
        d.not_trumps_forall = d.trumps_exists.complement();
        d.decisive = IdSet(n);
        for (std::size_t s = 0; s < n; ++s)
            if (d.trumps_exists.preimage(s).none())
                d.decisive.set(s);
        _derived = std::move(d);
    }

    [[nodiscard]] std::size_t arg_count() const { return _args.size(); }
    [[nodiscard]] std::size_t prop_count() const { return _props.size(); }

    [[nodiscard]] const std::string& arg_name(std::size_t i) const { return _args.at(i); }
    [[nodiscard]] const std::string& prop_name(std::size_t i) const { return _props.at(i); }
    [[nodiscard]] const std::vector<std::string>& arg_names() const { return _args; }
    [[nodiscard]] const std::vector<std::string>& prop_names() const { return _props; }

    [[nodiscard]] std::optional<std::size_t> find_arg(std::string_view id) const
    {
        auto it = _arg_index.find(std::string(id));
        return it == _arg_index.end() ? std::nullopt : std::optional{it->second};
    }

    [[nodiscard]] std::optional<std::size_t> find_prop(std::string_view id) const
    {
        auto it = _prop_index.find(std::string(id));
        return it == _prop_index.end() ? std::nullopt : std::optional{it->second};
    }

    [[nodiscard]] std::size_t arg(std::string_view id) const
    {
        if (auto i = find_arg(id))
            return *i;
        throw UnknownIdentifier("argument", id);
    }

    [[nodiscard]] std::size_t prop(std::string_view id) const
    {
        if (auto i = find_prop(id))
            return *i;
        throw UnknownIdentifier("proposition", id);
    }

    [[nodiscard]] IdSet args(std::span<const std::string> ids) const
    {
        IdSet out(arg_count());
        for (const auto& id : ids)
            out.set(arg(id));
        return out;
    }

    [[nodiscard]] IdSet args(std::initializer_list<std::string_view> ids) const
    {
        IdSet out(arg_count());
        for (auto id : ids)
            out.set(arg(id));
        return out;
    }

    [[nodiscard]] IdSet props(std::initializer_list<std::string_view> ids) const
    {
        IdSet out(prop_count());
        for (auto id : ids)
            out.set(prop(id));
        return out;
    }

    [[nodiscard]] std::vector<std::string> arg_names(const IdSet& s) const
    {
        std::vector<std::string> out;
        for_each_member(s, [&](std::size_t i) { out.push_back(_args[i]); });
        return out;
    }

    [[nodiscard]] std::vector<std::string> prop_names(const IdSet& s) const
    {
        std::vector<std::string> out;
        for_each_member(s, [&](std::size_t i) { out.push_back(_props[i]); });
        return out;
    }

    [[nodiscard]] IdSet all_args() const { return full_set(arg_count()); }
    [[nodiscard]] IdSet no_args() const { return IdSet(arg_count()); }
    [[nodiscard]] IdSet all_props() const { return full_set(prop_count()); }
    [[nodiscard]] IdSet no_props() const { return IdSet(prop_count()); }

    /// Support relation, arguments x propositions.
    [[nodiscard]] const Relation& support() const { return _support; }
    [[nodiscard]] const DerivedRelations& derived() const { return _derived; }
    [[nodiscard]] const Relation& trumps() const { return _derived.trumps_exists; }
    [[nodiscard]] const Relation& trumps_forall() const { return _derived.trumps_forall; }
    [[nodiscard]] const Relation& not_trumps() const { return _derived.not_trumps_exists; }
    [[nodiscard]] const IdSet& decisive() const { return _derived.decisive; }

    [[nodiscard]] bool has_perspectives() const { return !_perspectives.empty(); }
    [[nodiscard]] std::size_t perspective_count() const { return _perspectives.size(); }
    [[nodiscard]] const std::string& perspective_name(std::size_t p) const { return _perspective_names.at(p); }
    [[nodiscard]] const Relation& perspective(std::size_t p) const { return _perspectives.at(p); }

    [[nodiscard]] std::optional<std::size_t> find_perspective(std::string_view id) const
    {
        auto it = std::find(_perspective_names.begin(), _perspective_names.end(), id);
        if (it == _perspective_names.end())
            return std::nullopt;
        return static_cast<std::size_t>(it - _perspective_names.begin());
    }

    /// Canonical identifier-level form of this situation.
    [[nodiscard]] const DecisionSituation& document() const { return _doc; }

private:
    DecisionSituation _doc;
    std::vector<std::string> _args;
    std::vector<std::string> _props;
    std::unordered_map<std::string, std::size_t> _arg_index;
    std::unordered_map<std::string, std::size_t> _prop_index;
    Relation _support;
    std::vector<std::string> _perspective_names;
    std::vector<Relation> _perspectives;
    DerivedRelations _derived;
};

inline const DerivedRelations& derive_relations(const Situation& sit) { return sit.derived(); }

/// Re-encodes a situation with the direct encoding (trumps_exists plus its
/// overlap with not_trumps_exists). Derived relations are unchanged.
inline DecisionSituation to_direct(const DecisionSituation& input)
{
    const Situation sit(input);
    DecisionSituation out = sit.document();
    DirectEncoding de;
    const auto& d = sit.derived();
    for (auto [a, b] : d.trumps_exists.pairs()) {
        de.trumps_exists.emplace_back(sit.arg_name(a), sit.arg_name(b));
        if (d.not_trumps_exists.contains(a, b))
            de.ambivalent.emplace_back(sit.arg_name(a), sit.arg_name(b));
    }
    out.relations = std::move(de);
    return canonicalize(std::move(out));
}

} // namespace dj
