#pragma once

// Umbrella header for the SC-Biclust library.

#include "scbiclust/bench.hpp"
#include "scbiclust/bicluster.hpp"
#include "scbiclust/csv.hpp"
#include "scbiclust/error.hpp"
#include "scbiclust/heatmap.hpp"
#include "scbiclust/hierarchical.hpp"
#include "scbiclust/kmeans.hpp"
#include "scbiclust/matrix.hpp"
#include "scbiclust/mean_pipeline.hpp"
#include "scbiclust/null.hpp"
#include "scbiclust/parallel.hpp"
#include "scbiclust/result_json.hpp"
#include "scbiclust/rng.hpp"
#include "scbiclust/scoring.hpp"
#include "scbiclust/sim.hpp"
#include "scbiclust/special.hpp"
#include "scbiclust/variance.hpp"
