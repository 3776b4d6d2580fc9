#pragma once

#include "bench.hpp"
#include "characteristic.hpp"
#include "conflict_resolution.hpp"
#include "dense.hpp"
#include "generator.hpp"
#include "kaczmarz.hpp"
#include "oracle.hpp"
#include "qr_solver.hpp"
#include "regression.hpp"
#include "relaxation.hpp"
#include "solver_config.hpp"
#include "spec_io.hpp"
#include "spec_model.hpp"
