#pragma once

#include "primesig/classical_sampling.hpp"
#include "primesig/config.hpp"
#include "primesig/errors.hpp"
#include "primesig/fft.hpp"
#include "primesig/gap_histogram.hpp"
#include "primesig/generalized_sampling.hpp"
#include "primesig/grid.hpp"
#include "primesig/io.hpp"
#include "primesig/parallel.hpp"
#include "primesig/pipeline.hpp"
#include "primesig/rng.hpp"
#include "primesig/sequences.hpp"
#include "primesig/sha256.hpp"
#include "primesig/spectrum.hpp"
#include "primesig/svg.hpp"
#include "primesig/version.hpp"
