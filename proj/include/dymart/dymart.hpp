#pragma once

#include "dymart/space.hpp"
#include "dymart/filtration.hpp"
#include "dymart/martingale.hpp"
#include "dymart/integral.hpp"
#include "dymart/sde.hpp"
#include "dymart/io.hpp"
#include "dymart/rng.hpp"
