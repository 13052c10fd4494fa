#pragma once

// Umbrella header for the mode-qubit entanglement-swapping simulator.

#include "swapsim/fock.hpp"
#include "swapsim/optics.hpp"
#include "swapsim/measure.hpp"
#include "swapsim/experiment.hpp"
#include "swapsim/config.hpp"
#include "swapsim/io.hpp"
#include "swapsim/checks.hpp"
#include "swapsim/version.hpp"
