#pragma once

#include "bqec/measure.hpp"

#include <string>

namespace bqec::runner {

/// Cache directory: $BQEC_CACHE_DIR if set, else ./.bqec-cache.
std::string cache_dir();

/// Adaptive-homodyne H matrix with an on-disk cache keyed by (dim, lmax).
measure::HMatrix cached_ahd(int dim, int lmax = -1);

/// H matrix for a scheme at a given dimension, disk-cached where expensive.
measure::HMatrix h_for_scheme(measure::Scheme scheme, int dim);

}  // namespace bqec::runner
