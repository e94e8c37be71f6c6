#pragma once

#include "dj/agent.hpp"
#include "dj/conditions.hpp"
#include "dj/elicitation.hpp"
#include "dj/fixtures.hpp"
#include "dj/fuzz.hpp"
#include "dj/generate.hpp"
#include "dj/io.hpp"
#include "dj/judgment.hpp"
#include "dj/model.hpp"
#include "dj/relation.hpp"
#include "dj/session.hpp"
#include "dj/situation.hpp"
