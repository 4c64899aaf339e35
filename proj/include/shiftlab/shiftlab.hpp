#pragma once

// Umbrella header.

#include "constructor.hpp"
#include "criteria.hpp"
#include "errors.hpp"
#include "orbitlab.hpp"
#include "seqspace.hpp"
#include "shiftops.hpp"
#include "subspace.hpp"
