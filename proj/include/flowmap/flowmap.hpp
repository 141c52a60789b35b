#pragma once

#include "flowmap/dataset.hpp"
#include "flowmap/errors.hpp"
#include "flowmap/field.hpp"
#include "flowmap/grid.hpp"
#include "flowmap/linalg.hpp"
#include "flowmap/matrix.hpp"
#include "flowmap/mlp.hpp"
#include "flowmap/nsops.hpp"
#include "flowmap/pipeline.hpp"
#include "flowmap/rng.hpp"
#include "flowmap/snapshot.hpp"
#include "flowmap/som.hpp"
