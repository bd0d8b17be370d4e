#pragma once

// Target-class prior estimation for positive-unlabeled data under label
// shift: kernel mean-embedding statistics, the closed-form prior estimator
// with computable deviation bounds, the KM2 hull-projection baseline, and a
// seeded benchmark harness.

#include "priorshift/bounds.hpp"
#include "priorshift/csv.hpp"
#include "priorshift/datagen.hpp"
#include "priorshift/errors.hpp"
#include "priorshift/estimator.hpp"
#include "priorshift/harness.hpp"
#include "priorshift/kernel.hpp"
#include "priorshift/km2.hpp"
#include "priorshift/rng.hpp"
#include "priorshift/sample.hpp"
