#pragma once

#include "skagree/error.hpp"
#include "skagree/pmf.hpp"
#include "skagree/info.hpp"
#include "skagree/optimize.hpp"
#include "skagree/correlation.hpp"
#include "skagree/thresholds.hpp"
#include "skagree/feasibility.hpp"
#include "skagree/dsbe.hpp"
#include "skagree/io.hpp"
