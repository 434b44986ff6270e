#pragma once

// Umbrella header: chip-firing on the line and its path-like relatives,
// labeled and unlabeled, plus enumeration, root-system firing, sampling,
// and the verification suites.

#include "chipfire/config.hpp"
#include "chipfire/engine.hpp"
#include "chipfire/explorer.hpp"
#include "chipfire/graph.hpp"
#include "chipfire/montecarlo.hpp"
#include "chipfire/rng.hpp"
#include "chipfire/util.hpp"
#include "chipfire/vector_firing.hpp"
#include "chipfire/verify.hpp"
#include "chipfire/version.hpp"
