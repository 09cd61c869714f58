#ifndef REACHMO_REACHMO_HPP
#define REACHMO_REACHMO_HPP

#include "reachmo/error.hpp"
#include "reachmo/linalg.hpp"
#include "reachmo/geometry.hpp"
#include "reachmo/parallel.hpp"
#include "reachmo/model.hpp"
#include "reachmo/network_io.hpp"
#include "reachmo/moments.hpp"
#include "reachmo/switched.hpp"
#include "reachmo/lp.hpp"
#include "reachmo/milp.hpp"
#include "reachmo/fsp.hpp"
#include "reachmo/reach.hpp"
#include "reachmo/control.hpp"
#include "reachmo/ssa.hpp"

#endif  // REACHMO_REACHMO_HPP
