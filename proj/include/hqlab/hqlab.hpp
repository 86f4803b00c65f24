#pragma once

#include "hqlab/ar_select.hpp"
#include "hqlab/error.hpp"
#include "hqlab/lr_select.hpp"
#include "hqlab/numkernel.hpp"
#include "hqlab/overestimation.hpp"
#include "hqlab/penalty.hpp"
#include "hqlab/report.hpp"
#include "hqlab/rng.hpp"
#include "hqlab/simlab.hpp"
