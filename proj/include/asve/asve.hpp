#pragma once

#include "asve/covol.hpp"
#include "asve/error.hpp"
#include "asve/estimator.hpp"
#include "asve/io.hpp"
#include "asve/jumps.hpp"
#include "asve/numerics.hpp"
#include "asve/preaverage.hpp"
#include "asve/sim.hpp"
#include "asve/studies.hpp"
#include "asve/svg.hpp"
#include "asve/threshold.hpp"
#include "asve/timescheme.hpp"
#include "asve/tuning.hpp"
#include "asve/types.hpp"
#include "asve/wavelet.hpp"
