#pragma once

#include "aoilab/engine.hpp"
#include "aoilab/error.hpp"
#include "aoilab/generators.hpp"
#include "aoilab/harness.hpp"
#include "aoilab/io.hpp"
#include "aoilab/metrics.hpp"
#include "aoilab/model.hpp"
#include "aoilab/oracle.hpp"
#include "aoilab/policies.hpp"
#include "aoilab/ratio.hpp"
#include "aoilab/runs.hpp"
#include "aoilab/search.hpp"
