#pragma once

#include "koopman_sp/constants.hpp"
#include "koopman_sp/cycle.hpp"
#include "koopman_sp/field.hpp"
#include "koopman_sp/grid_io.hpp"
#include "koopman_sp/model.hpp"
#include "koopman_sp/ode.hpp"
#include "koopman_sp/singular.hpp"
#include "koopman_sp/spectral.hpp"
#include "koopman_sp/sweep.hpp"
#include "koopman_sp/types.hpp"
