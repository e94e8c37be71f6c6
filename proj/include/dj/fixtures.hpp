#pragma once

#include "dj/model.hpp"
#include "dj/situation.hpp"

#include <map>
#include <string>
#include <vector>

// Bundled named instances. The same documents ship under fixtures/.
namespace dj::fixtures {

/// One proposition t supported by s1 and s; s2 trumps s1 and s3 trumps s2.
inline DecisionSituation weather()
{
    return {{"t"}, {"s", "s1", "s2", "s3"}, {{"s1", "t"}, {"s", "t"}},
            PerspectiveEncoding{{{"p1", {{"s2", "s1"}, {"s3", "s2"}}}}}};
}

/// Two propositions, each with its own untrumped supporter.
inline DecisionSituation variant()
{
    return {{"t1", "t2"}, {"s1", "s2"}, {{"s1", "t1"}, {"s2", "t2"}}, PerspectiveEncoding{{{"p1", {}}}}};
}

/// The budget discussion: s is attacked twice, each attacker is answered,
/// and s1r, s2r, sr are reformulations that escape one or both attackers.
inline DecisionSituation budget()
{
    return {{"t"},
            {"s", "sc1", "sc2", "sc1c", "sc2c", "s1r", "s2r", "sr"},
            {{"s", "t"}, {"s1r", "t"}, {"s2r", "t"}, {"sr", "t"}},
            PerspectiveEncoding{{{"p1",
                                  {{"sc1", "s"},
                                   {"sc2", "s"},
                                   {"sc1c", "sc1"},
                                   {"sc2c", "sc2"},
                                   {"sc2", "s1r"},
                                   {"sc1", "s2r"}}}}}};
}

inline Model budget_model() { return {{{"s", "t"}}, {{"sc1c", "sc1"}, {"sc2c", "sc2"}}}; }

/// s2 trumps s1 in one perspective only, so t is neither justifiable nor untenable.
inline DecisionSituation flicker()
{
    return {{"t"}, {"s1", "s2"}, {{"s1", "t"}}, PerspectiveEncoding{{{"p1", {{"s2", "s1"}}}, {"p2", {}}}}};
}

/// No trump pairs at all.
inline DecisionSituation empty()
{
    return {{"t"}, {"a", "b", "s"}, {{"s", "t"}}, PerspectiveEncoding{{{"p1", {}}}}};
}

inline const std::map<std::string, DecisionSituation>& all()
{
    static const std::map<std::string, DecisionSituation> m{
        {"budget", budget()}, {"empty", empty()}, {"flicker", flicker()}, {"variant", variant()}, {"weather", weather()}};
    return m;
}

} // namespace dj::fixtures
