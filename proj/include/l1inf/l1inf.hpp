#pragma once

#include "l1inf/errors.hpp"
#include "l1inf/matrix.hpp"
#include "l1inf/norms.hpp"
#include "l1inf/l1_ball.hpp"
#include "l1inf/lower_bounds.hpp"
#include "l1inf/prox.hpp"
#include "l1inf/oracle.hpp"
#include "l1inf/random.hpp"
#include "l1inf/solver.hpp"
#include "l1inf/bench.hpp"
#include "l1inf/io.hpp"
