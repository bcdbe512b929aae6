#pragma once

#include "ramify/artin_schreier.hpp"
#include "ramify/config.hpp"
#include "ramify/cutmodule.hpp"
#include "ramify/differential.hpp"
#include "ramify/errors.hpp"
#include "ramify/exact.hpp"
#include "ramify/json.hpp"
#include "ramify/matrixops.hpp"
#include "ramify/ramanalyzer.hpp"
#include "ramify/rational.hpp"
#include "ramify/residue.hpp"
#include "ramify/scalar_laurent.hpp"
#include "ramify/scalar_padic.hpp"
#include "ramify/snf.hpp"
#include "ramify/tower.hpp"
#include "ramify/valuegroup.hpp"
