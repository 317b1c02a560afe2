// spinres.hpp: umbrella header.

#pragma once

#include "spinres/errors.hpp"
#include "spinres/hilbert.hpp"
#include "spinres/ode.hpp"
#include "spinres/parallel.hpp"
#include "spinres/cubic.hpp"
#include "spinres/gain.hpp"
#include "spinres/mme.hpp"
#include "spinres/rapid_disent.hpp"
#include "spinres/bosonization.hpp"
#include "spinres/table/emit.hpp"
#include "spinres/config.hpp"
#include "spinres/sweep.hpp"
