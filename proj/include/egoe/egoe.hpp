#pragma once

#include "egoe/analytic_motion.hpp"
#include "egoe/archive.hpp"
#include "egoe/combinatorics.hpp"
#include "egoe/config.hpp"
#include "egoe/csv.hpp"
#include "egoe/decomposition.hpp"
#include "egoe/ensemble.hpp"
#include "egoe/errors.hpp"
#include "egoe/fluct_stats.hpp"
#include "egoe/fock_space.hpp"
#include "egoe/parallel.hpp"
#include "egoe/periodogram.hpp"
#include "egoe/pipeline.hpp"
#include "egoe/qhermite.hpp"
#include "egoe/spectra.hpp"
