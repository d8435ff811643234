#pragma once
// Umbrella header for the closed-form calculus, the simulator and the I/O layer.

#include "cells.hpp"
#include "document.hpp"
#include "engine.hpp"
#include "error.hpp"
#include "eu.hpp"
#include "json_io.hpp"
#include "matrix.hpp"
#include "model.hpp"
#include "output.hpp"
#include "params.hpp"
#include "presets.hpp"
#include "rng.hpp"
#include "scenario.hpp"
#include "tally.hpp"
#include "utility.hpp"
