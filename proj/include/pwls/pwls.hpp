#pragma once

#include "pwls/geometry.hpp"
#include "pwls/mesh.hpp"
#include "pwls/material.hpp"
#include "pwls/planewave.hpp"
#include "pwls/quadrature.hpp"
#include "pwls/block_system.hpp"
#include "pwls/assembly.hpp"
#include "pwls/cholmod_factor.hpp"
#include "pwls/solver.hpp"
#include "pwls/reference.hpp"
#include "pwls/json_io.hpp"
#include "pwls/solution_io.hpp"
#include "pwls/config.hpp"
#include "pwls/runner.hpp"
