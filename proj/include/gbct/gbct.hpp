#pragma once

#include "gbct/bench.hpp"
#include "gbct/cluster_formation.hpp"
#include "gbct/csv.hpp"
#include "gbct/dataset.hpp"
#include "gbct/error.hpp"
#include "gbct/evaluation.hpp"
#include "gbct/generators.hpp"
#include "gbct/granular_ball.hpp"
#include "gbct/kmeans.hpp"
#include "gbct/pipeline.hpp"
#include "gbct/svg.hpp"
#include "gbct/union_find.hpp"
