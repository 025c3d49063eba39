#pragma once

#include "isinglab/continuum.hpp"
#include "isinglab/errors.hpp"
#include "isinglab/exact.hpp"
#include "isinglab/inequalities.hpp"
#include "isinglab/jump_process.hpp"
#include "isinglab/kernels.hpp"
#include "isinglab/lattice.hpp"
#include "isinglab/nearest_neighbor.hpp"
#include "isinglab/parallel.hpp"
#include "isinglab/quadrature.hpp"
#include "isinglab/rng.hpp"
#include "isinglab/stats.hpp"
#include "isinglab/transfer_matrix.hpp"
#include "isinglab/version.hpp"
