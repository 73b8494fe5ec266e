#pragma once

#include "hyma/channel.hpp"
#include "hyma/config.hpp"
#include "hyma/noma_solver.hpp"
#include "hyma/oma_solver.hpp"
#include "hyma/oracle.hpp"
#include "hyma/pairing.hpp"
#include "hyma/policies.hpp"
#include "hyma/queueing.hpp"
#include "hyma/rate.hpp"
#include "hyma/rng.hpp"
#include "hyma/simulator.hpp"
#include "hyma/state.hpp"
#include "hyma/sweep.hpp"
#include "hyma/verify.hpp"
