#pragma once

#include "percoplane/errors.hpp"
#include "percoplane/experiments.hpp"
#include "percoplane/map_io.hpp"
#include "percoplane/matching.hpp"
#include "percoplane/percolation.hpp"
#include "percoplane/planar_map.hpp"
#include "percoplane/rng.hpp"
#include "percoplane/site_bond.hpp"
#include "percoplane/tilings.hpp"
#include "percoplane/union_find.hpp"
