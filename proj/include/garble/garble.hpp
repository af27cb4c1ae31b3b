#pragma once

// Umbrella header: the whole library.

#include "garble/errors.hpp"
#include "garble/estimators.hpp"
#include "garble/experiment.hpp"
#include "garble/garbler.hpp"
#include "garble/io.hpp"
#include "garble/linalg.hpp"
#include "garble/model.hpp"
#include "garble/rng.hpp"
#include "garble/service.hpp"
#include "garble/tradeoff.hpp"
