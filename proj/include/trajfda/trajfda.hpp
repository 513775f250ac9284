#pragma once

#include "trajfda/benchmark.hpp"
#include "trajfda/boxplot.hpp"
#include "trajfda/core.hpp"
#include "trajfda/depth_rank.hpp"
#include "trajfda/detect.hpp"
#include "trajfda/error.hpp"
#include "trajfda/matern.hpp"
#include "trajfda/mcd.hpp"
#include "trajfda/models.hpp"
#include "trajfda/outlyingness.hpp"
#include "trajfda/pointwise_depth.hpp"
#include "trajfda/preprocess.hpp"
#include "trajfda/smoothing_spline.hpp"
#include "trajfda/stats.hpp"
