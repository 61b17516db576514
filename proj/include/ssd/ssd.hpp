#pragma once

#include "ssd/asymptotics.hpp"
#include "ssd/criterion.hpp"
#include "ssd/errors.hpp"
#include "ssd/evaluation.hpp"
#include "ssd/grid.hpp"
#include "ssd/ingest.hpp"
#include "ssd/models.hpp"
#include "ssd/moments.hpp"
#include "ssd/rng.hpp"
#include "ssd/solver.hpp"
