#pragma once

#include "ammsim/agents.hpp"
#include "ammsim/auction.hpp"
#include "ammsim/engine.hpp"
#include "ammsim/equilibrium.hpp"
#include "ammsim/pool.hpp"
