#pragma once

#include "gbdt/error.hpp"
#include "gbdt/matrix_core.hpp"
#include "gbdt/poly2.hpp"
#include "gbdt/poly_det.hpp"
#include "gbdt/seed.hpp"
#include "gbdt/engine.hpp"
#include "gbdt/grid.hpp"
#include "gbdt/rational.hpp"
#include "gbdt/bispectral.hpp"
#include "gbdt/three_wave.hpp"
#include "gbdt/verification.hpp"
