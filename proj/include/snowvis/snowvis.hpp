// Copyright 2026 The snowvis Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SNOWVIS_SNOWVIS_HPP
#define SNOWVIS_SNOWVIS_HPP

#include "snowvis/csv.hpp"
#include "snowvis/density_grid.hpp"
#include "snowvis/errors.hpp"
#include "snowvis/evaluation.hpp"
#include "snowvis/filter_mask.hpp"
#include "snowvis/geometry.hpp"
#include "snowvis/kdtree.hpp"
#include "snowvis/pointcloud_io.hpp"
#include "snowvis/snow_filters.hpp"
#include "snowvis/snow_sim.hpp"
#include "snowvis/visibility.hpp"

#endif  // SNOWVIS_SNOWVIS_HPP
