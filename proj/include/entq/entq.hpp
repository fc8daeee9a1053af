#pragma once

#include "entq/complex_matrix.hpp"
#include "entq/dataset.hpp"
#include "entq/eig.hpp"
#include "entq/errors.hpp"
#include "entq/eval.hpp"
#include "entq/features.hpp"
#include "entq/measures.hpp"
#include "entq/models/grid_search.hpp"
#include "entq/models/io.hpp"
#include "entq/models/lsboost.hpp"
#include "entq/models/mlp.hpp"
#include "entq/models/tree.hpp"
#include "entq/parallel.hpp"
#include "entq/rng.hpp"
#include "entq/state_types.hpp"
#include "entq/states.hpp"
#include "entq/text_io.hpp"
