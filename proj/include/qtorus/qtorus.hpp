// Umbrella header.
#pragma once

#include "qtorus/algebra.hpp"
#include "qtorus/ball_search.hpp"
#include "qtorus/connection.hpp"
#include "qtorus/element_matrix.hpp"
#include "qtorus/gns.hpp"
#include "qtorus/harness.hpp"
#include "qtorus/module.hpp"
#include "qtorus/propinquity.hpp"
#include "qtorus/random.hpp"
#include "qtorus/seminorms.hpp"
#include "qtorus/serialization.hpp"
