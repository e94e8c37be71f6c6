#pragma once

#include "dj/conditions.hpp"
#include "dj/situation.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dj {

enum class Profile { free, layered, cac_enforced };

inline const char* to_string(Profile p)
{
    switch (p) {
    case Profile::free: return "free";
    case Profile::layered: return "layered";
    case Profile::cac_enforced: return "cac-enforced";
    }
    return "?";
}

inline std::optional<Profile> parse_profile(std::string_view s)
{
    if (s == "free")
        return Profile::free;
    if (s == "layered")
        return Profile::layered;
    if (s == "cac-enforced")
        return Profile::cac_enforced;
    return std::nullopt;
}

struct GenParams
{
    std::uint64_t seed = 0;
    std::size_t n_props = 2;
    std::size_t n_args = 6;
    std::size_t n_perspectives = 1;
    double support_density = 0.3;
    double trump_density = 0.2;
    double ambivalence_rate = 0.0;
    Profile profile = Profile::free;
};

class NonConvergence : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Bernoulli draw from raw engine output, identical on every platform.
inline bool draw(std::mt19937_64& rng, double p) { return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p; }

inline std::size_t draw_index(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

inline std::string numbered(std::string_view prefix, std::size_t i, std::size_t n)
{
    std::string num = std::to_string(i);
    const std::size_t width = std::to_string(n).size();
    return std::string(prefix) + std::string(width - num.size(), '0') + num;
}

inline void check_params(const GenParams& p)
{
    if (p.n_props == 0 || p.n_args == 0 || p.n_perspectives == 0)
        throw std::invalid_argument("generator sizes must be positive");
    for (double x : {p.support_density, p.trump_density, p.ambivalence_rate})
        if (!(x >= 0.0 && x <= 1.0))
            throw std::invalid_argument("generator densities must lie in [0, 1]");
}

} // namespace detail

/// A pseudorandom situation; a pure function of the parameters. The
/// cac-enforced profile is the layered draw passed through enforce_cac.
inline DecisionSituation gen_random(const GenParams& p);

/// Adds synthetic arguments until the whole argument set passes check_cac.
///
/// A reinstatement failure (s1, s2, s3) gets a replacer of s1 with the same
/// supports and the same trumps per perspective, trumped only by those
/// trumpers of s1 that s3 does not always trump. An answerability failure
/// (s', s) gets a fresh argument trumping s' everywhere. Identifiers of added
/// arguments start with "~r".
inline DecisionSituation enforce_cac(const DecisionSituation& input, std::size_t* added = nullptr)
{
    DecisionSituation doc = canonicalize(input);
    {
        const Situation sit(doc);
        if (!trumps_acyclic(sit))
            throw std::invalid_argument("enforce_cac needs an acyclic trump relation");
    }
    const std::size_t bound = doc.arguments.size() * 4;
    std::set<std::string> taken(doc.arguments.begin(), doc.arguments.end());
    std::size_t serial = 0;
    auto fresh = [&] {
        std::string id;
        do
            id = "~r" + std::to_string(++serial);
        while (taken.contains(id));
        taken.insert(id);
        doc.arguments.push_back(id);
        return id;
    };

    // For each pair kind, visit every relation list the encoding carries.
    auto add_like = [&](const std::string& from, const std::string& to, const std::string& like_from,
                        const std::string& like_to) {
        const IdPair like{like_from, like_to};
        if (auto* pe = std::get_if<PerspectiveEncoding>(&doc.relations)) {
            for (auto& [name, pairs] : pe->perspectives)
                if (std::find(pairs.begin(), pairs.end(), like) != pairs.end())
                    pairs.emplace_back(from, to);
        } else {
            auto& de = std::get<DirectEncoding>(doc.relations);
            if (std::find(de.trumps_exists.begin(), de.trumps_exists.end(), like) != de.trumps_exists.end())
                de.trumps_exists.emplace_back(from, to);
            if (std::find(de.ambivalent.begin(), de.ambivalent.end(), like) != de.ambivalent.end())
                de.ambivalent.emplace_back(from, to);
        }
    };
    auto add_everywhere = [&](const std::string& from, const std::string& to) {
        if (auto* pe = std::get_if<PerspectiveEncoding>(&doc.relations)) {
            for (auto& [name, pairs] : pe->perspectives)
                pairs.emplace_back(from, to);
        } else {
            std::get<DirectEncoding>(doc.relations).trumps_exists.emplace_back(from, to);
        }
    };

    for (std::size_t n = 0;; ++n) {
        const Situation sit(doc);
        const auto all = sit.all_args();
        auto reinstatement = check_closed_reinstatement(sit, all);
        auto answerability = check_answerability(sit, all);
        if (reinstatement.pass && answerability.pass && check_cac(sit, all).cac) {
            if (added)
                *added = n;
            return canonicalize(std::move(doc));
        }
        if (n == bound)
            throw NonConvergence("no CAC repair within " + std::to_string(bound) + " added arguments");

        if (!reinstatement.pass) {
            const auto& w = reinstatement.witnesses.front();
            const std::size_t s1 = w[0], s3 = w[2];
            const std::string r = fresh();
            const std::string& s1n = sit.arg_name(s1);
            for_each_member(sit.support().image(s1),
                            [&](std::size_t t) { doc.support.emplace_back(r, sit.prop_name(t)); });
            for_each_member(sit.trumps().image(s1),
                            [&](std::size_t y) { add_like(r, sit.arg_name(y), s1n, sit.arg_name(y)); });
            const IdSet allowed = sit.trumps().preimage(s1) - sit.trumps_forall().image(s3);
            for_each_member(allowed, [&](std::size_t x) { add_like(sit.arg_name(x), r, sit.arg_name(x), s1n); });
        } else {
            const auto& w = answerability.witnesses.front();
            add_everywhere(fresh(), sit.arg_name(w[0]));
        }
    }
}

inline DecisionSituation gen_random(const GenParams& p)
{
    detail::check_params(p);
    std::mt19937_64 rng(p.seed);
    DecisionSituation doc;
    for (std::size_t i = 1; i <= p.n_props; ++i)
        doc.propositions.push_back(detail::numbered("t", i, p.n_props));
    for (std::size_t i = 1; i <= p.n_args; ++i)
        doc.arguments.push_back(detail::numbered("a", i, p.n_args));

    for (const auto& s : doc.arguments)
        for (const auto& t : doc.propositions)
            if (detail::draw(rng, p.support_density))
                doc.support.emplace_back(s, t);

    const bool layered = p.profile != Profile::free;
    std::vector<std::size_t> layer(p.n_args);
    const std::size_t layers = std::min<std::size_t>(p.n_args, 4);
    for (auto& l : layer)
        l = detail::draw_index(rng, layers);

    // A shared base relation, then ambivalence by deleting some pairs from a
    // nonempty proper subset of the perspectives.
    PerspectiveEncoding pe;
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= p.n_perspectives; ++i) {
        names.push_back(detail::numbered("p", i, p.n_perspectives));
        pe.perspectives[names.back()];
    }
    for (std::size_t a = 0; a < p.n_args; ++a) {
        for (std::size_t b = 0; b < p.n_args; ++b) {
            if (a == b || (layered && layer[a] <= layer[b]))
                continue;
            if (!detail::draw(rng, p.trump_density))
                continue;
            std::uint64_t drop = 0;
            if (p.n_perspectives > 1 && detail::draw(rng, p.ambivalence_rate)) {
                const std::uint64_t subsets = (std::uint64_t{1} << p.n_perspectives) - 2;
                drop = 1 + rng() % subsets;
            }
            for (std::size_t q = 0; q < p.n_perspectives; ++q)
                if (!(drop >> q & 1))
                    pe.perspectives[names[q]].emplace_back(doc.arguments[a], doc.arguments[b]);
        }
    }
    doc.relations = std::move(pe);
    doc = canonicalize(std::move(doc));
    if (p.profile == Profile::cac_enforced)
        return enforce_cac(doc);
    return doc;
}

} // namespace dj
