#pragma once

#include "ragscale/allocation.hpp"
#include "ragscale/datastore_budget.hpp"
#include "ragscale/error.hpp"
#include "ragscale/fitter.hpp"
#include "ragscale/laws.hpp"
#include "ragscale/records.hpp"
#include "ragscale/rng.hpp"
#include "ragscale/serialize.hpp"
#include "ragscale/synth.hpp"
#include "ragscale/validation.hpp"
