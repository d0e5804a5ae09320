#pragma once

// Umbrella header for the library (the CLI lives in quanprism/cli.hpp).

#include "quanprism/angle.hpp"
#include "quanprism/channel_types.hpp"
#include "quanprism/channels.hpp"
#include "quanprism/circuit.hpp"
#include "quanprism/dephasing.hpp"
#include "quanprism/errors.hpp"
#include "quanprism/numerics.hpp"
#include "quanprism/preservation.hpp"
#include "quanprism/random.hpp"
#include "quanprism/states.hpp"
