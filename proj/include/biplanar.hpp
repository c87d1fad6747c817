#pragma once

#include "biplanar/error.hpp"
#include "biplanar/geometry.hpp"
#include "biplanar/dlt.hpp"
#include "biplanar/triangulation.hpp"
#include "biplanar/random.hpp"
#include "biplanar/perturbation.hpp"
#include "biplanar/propagation.hpp"
#include "biplanar/stats.hpp"
#include "biplanar/scenario.hpp"
#include "biplanar/monte_carlo.hpp"
#include "biplanar/studies.hpp"
#include "biplanar/config_io.hpp"
#include "biplanar/report.hpp"
#include "biplanar/invariants.hpp"
