#pragma once

#include "rpm/classifier.hpp"
#include "rpm/error.hpp"
#include "rpm/evaluation.hpp"
#include "rpm/forecasting.hpp"
#include "rpm/parallel.hpp"
#include "rpm/rate_features.hpp"
#include "rpm/synthgen.hpp"
#include "rpm/temporal_graph.hpp"
#include "rpm/topo_metrics.hpp"
