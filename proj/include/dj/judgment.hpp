#pragma once

#include "dj/situation.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace dj {

enum class Status { justifiable, untenable, neither };

inline const char* to_string(Status s)
{
    switch (s) {
    case Status::justifiable: return "justifiable";
    case Status::untenable: return "untenable";
    case Status::neither: return "neither";
    }
    return "?";
}

/// Lowest decisive supporter of `t`, if any.
inline std::optional<std::size_t> justification_witness(const Situation& sit, std::size_t t)
{
    auto candidates = sit.support().preimage(t) & sit.decisive();
    auto first = candidates.find_first();
    if (first == IdSet::npos)
        return std::nullopt;
    return first;
}

inline bool is_justifiable(const Situation& sit, std::size_t t)
{
    return justification_witness(sit, t).has_value();
}

/// Every supporter of `t` is trumped in all perspectives by a decisive argument.
inline bool is_untenable(const Situation& sit, std::size_t t)
{
    const auto& d = sit.derived();
    const auto defeated = d.trumps_forall.image(d.decisive);
    return sit.support().preimage(t).is_subset_of(defeated);
}

inline bool is_justifiable(const Situation& sit, std::string_view t) { return is_justifiable(sit, sit.prop(t)); }
inline bool is_untenable(const Situation& sit, std::string_view t) { return is_untenable(sit, sit.prop(t)); }

/// The set of justifiable propositions.
inline IdSet deliberated_judgment(const Situation& sit)
{
    IdSet out(sit.prop_count());
    for (std::size_t t = 0; t < sit.prop_count(); ++t)
        if (is_justifiable(sit, t))
            out.set(t);
    return out;
}

inline Status status_of(const Situation& sit, std::size_t t)
{
    if (is_justifiable(sit, t))
        return Status::justifiable;
    if (is_untenable(sit, t))
        return Status::untenable;
    return Status::neither;
}

struct ClearCutReport
{
    bool clear_cut = true;
    std::vector<Status> statuses; // indexed by proposition

    [[nodiscard]] IdSet undecided() const
    {
        IdSet out(statuses.size());
        for (std::size_t t = 0; t < statuses.size(); ++t)
            if (statuses[t] == Status::neither)
                out.set(t);
        return out;
    }
};

inline ClearCutReport clear_cut(const Situation& sit)
{
    ClearCutReport r;
    r.statuses.reserve(sit.prop_count());
    for (std::size_t t = 0; t < sit.prop_count(); ++t) {
        r.statuses.push_back(status_of(sit, t));
        if (r.statuses.back() == Status::neither)
            r.clear_cut = false;
    }
    return r;
}

inline bool is_clear_cut(const Situation& sit) { return clear_cut(sit).clear_cut; }

} // namespace dj
