#pragma once

#include "ugi/errors.hpp"
#include "ugi/linalg.hpp"
#include "ugi/special_functions.hpp"
#include "ugi/det_ratio.hpp"
#include "ugi/characters.hpp"
#include "ugi/integrals.hpp"
#include "ugi/oracles.hpp"
