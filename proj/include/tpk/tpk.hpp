#pragma once

#include "tpk/dense.hpp"
#include "tpk/error.hpp"
#include "tpk/histogram.hpp"
#include "tpk/io.hpp"
#include "tpk/northwest.hpp"
#include "tpk/ot.hpp"
#include "tpk/polytope.hpp"
#include "tpk/psd.hpp"
