#pragma once

#include "rydsim/analysis.hpp"
#include "rydsim/angular.hpp"
#include "rydsim/config.hpp"
#include "rydsim/constants.hpp"
#include "rydsim/ensemble.hpp"
#include "rydsim/ini.hpp"
#include "rydsim/levels.hpp"
#include "rydsim/pulses.hpp"
#include "rydsim/rng.hpp"
#include "rydsim/trace.hpp"
#include "rydsim/trapstats.hpp"
#include "rydsim/vdw.hpp"
#include "rydsim/version.hpp"
