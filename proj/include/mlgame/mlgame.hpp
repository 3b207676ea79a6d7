#pragma once

#include "bisim.hpp"
#include "fo.hpp"
#include "game.hpp"
#include "graphs.hpp"
#include "hierarchy.hpp"
#include "kripke.hpp"
#include "ml.hpp"
#include "model_io.hpp"
#include "solver.hpp"
#include "strategy.hpp"
