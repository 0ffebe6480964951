#pragma once

// Umbrella header for the whole library.

#include "vdfp/actor.hpp"
#include "vdfp/array.hpp"
#include "vdfp/config.hpp"
#include "vdfp/cvae.hpp"
#include "vdfp/ddpg.hpp"
#include "vdfp/env.hpp"
#include "vdfp/grad_check.hpp"
#include "vdfp/harness.hpp"
#include "vdfp/params.hpp"
#include "vdfp/replay.hpp"
#include "vdfp/representation.hpp"
#include "vdfp/return_model.hpp"
#include "vdfp/rng.hpp"
#include "vdfp/snapshot.hpp"
#include "vdfp/tabular.hpp"
#include "vdfp/tape.hpp"
