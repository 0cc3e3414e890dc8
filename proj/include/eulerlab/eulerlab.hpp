#pragma once

#include <eulerlab/errors.hpp>
#include <eulerlab/grid.hpp>
#include <eulerlab/nonlinearity.hpp>
#include <eulerlab/linear_solver.hpp>
#include <eulerlab/oned.hpp>
#include <eulerlab/elliptic2d.hpp>
#include <eulerlab/flows.hpp>
#include <eulerlab/diagnostics.hpp>
#include <eulerlab/streamlines.hpp>
#include <eulerlab/io.hpp>
