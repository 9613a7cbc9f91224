#pragma once

#include "viboost/adaboost.hpp"
#include "viboost/datagen.hpp"
#include "viboost/error.hpp"
#include "viboost/gibbs.hpp"
#include "viboost/hypotheses.hpp"
#include "viboost/numerics.hpp"
#include "viboost/random.hpp"
#include "viboost/slice.hpp"
#include "viboost/viboost.hpp"
#include "viboost/vlog.hpp"
