#pragma once

#include "apsolve/ap_kernel.hpp"
#include "apsolve/baselines.hpp"
#include "apsolve/errors.hpp"
#include "apsolve/linalg.hpp"
#include "apsolve/matrix_market.hpp"
#include "apsolve/partition.hpp"
#include "apsolve/problems.hpp"
#include "apsolve/qr.hpp"
#include "apsolve/solvers.hpp"
