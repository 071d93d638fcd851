#pragma once

#include "traclets/config.hpp"
#include "traclets/error.hpp"
#include "traclets/geo.hpp"
#include "traclets/ingest.hpp"
#include "traclets/kinematics.hpp"
#include "traclets/manifest.hpp"
#include "traclets/metrics.hpp"
#include "traclets/model.hpp"
#include "traclets/parallel.hpp"
#include "traclets/pipeline.hpp"
#include "traclets/png.hpp"
#include "traclets/preprocess.hpp"
#include "traclets/raster.hpp"
#include "traclets/version.hpp"
