// lsq.hpp — umbrella header

#pragma once

#include "lsq/errors.hpp"
#include "lsq/operator_core.hpp"
#include "lsq/weighted_lp.hpp"
#include "lsq/lindblad.hpp"
#include "lsq/davies.hpp"
#include "lsq/lsi_bounds.hpp"
#include "lsq/product_graph.hpp"
#include "lsq/fermion.hpp"
#include "lsq/experiment.hpp"
#include "lsq/selftest.hpp"
