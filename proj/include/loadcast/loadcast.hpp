#pragma once

// Umbrella header: the whole forecasting toolkit.

#include "loadcast/cluster.hpp"
#include "loadcast/csv.hpp"
#include "loadcast/errors.hpp"
#include "loadcast/evaluate.hpp"
#include "loadcast/experiment.hpp"
#include "loadcast/hpo.hpp"
#include "loadcast/mlp.hpp"
#include "loadcast/pipeline.hpp"
#include "loadcast/profile.hpp"
#include "loadcast/rng.hpp"
#include "loadcast/scaler.hpp"
#include "loadcast/series.hpp"
#include "loadcast/svg.hpp"
#include "loadcast/synthetic.hpp"
#include "loadcast/time.hpp"
#include "loadcast/timezone.hpp"
#include "loadcast/train.hpp"
#include "loadcast/window.hpp"
#include "loadcast/wrangle.hpp"
