#pragma once

#include "stiffpress/error.hpp"
#include "stiffpress/core.hpp"
#include "stiffpress/pressure.hpp"
#include "stiffpress/shapes.hpp"
#include "stiffpress/barenblatt.hpp"
#include "stiffpress/poisson.hpp"
#include "stiffpress/metrics.hpp"
#include "stiffpress/solver.hpp"
#include "stiffpress/limits.hpp"
#include "stiffpress/harness.hpp"
#include "stiffpress/config.hpp"
#include "stiffpress/io.hpp"
#include "stiffpress/validate.hpp"
