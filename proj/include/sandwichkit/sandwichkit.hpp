#pragma once

#include "sandwichkit/numerics/lp.hpp"
#include "sandwichkit/geometry.hpp"
#include "sandwichkit/convexfn.hpp"
#include "sandwichkit/sandwich.hpp"
#include "sandwichkit/duality.hpp"
#include "sandwichkit/interiority.hpp"
#include "sandwichkit/oracle.hpp"
#include "sandwichkit/io/scenario.hpp"
