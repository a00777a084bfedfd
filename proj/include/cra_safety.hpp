#pragma once

#include "cra_safety/linalg.hpp"
#include "cra_safety/poly.hpp"
#include "cra_safety/location.hpp"
#include "cra_safety/plant.hpp"
#include "cra_safety/cost.hpp"
#include "cra_safety/controllers.hpp"
#include "cra_safety/hybrid.hpp"
#include "cra_safety/lp.hpp"
#include "cra_safety/verifier.hpp"
#include "cra_safety/synthesizer.hpp"
#include "cra_safety/config.hpp"
#include "cra_safety/io.hpp"
