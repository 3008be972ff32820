#ifndef INEQLAB_INEQLAB_HPP
#define INEQLAB_INEQLAB_HPP

#include "config.hpp"
#include "csv.hpp"
#include "diagnostics.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "linsolve.hpp"
#include "regions.hpp"
#include "rng.hpp"
#include "sampler.hpp"
#include "scheme.hpp"
#include "svg.hpp"
#include "verifier.hpp"

#endif
