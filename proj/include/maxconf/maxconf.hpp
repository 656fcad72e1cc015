#pragma once

#include "maxconf/certify.hpp"
#include "maxconf/ensembles.hpp"
#include "maxconf/error.hpp"
#include "maxconf/json_io.hpp"
#include "maxconf/ncmodel.hpp"
#include "maxconf/oracle.hpp"
#include "maxconf/oracle_suite.hpp"
#include "maxconf/parallel.hpp"
#include "maxconf/qmath.hpp"
#include "maxconf/random.hpp"
#include "maxconf/simulator.hpp"
#include "maxconf/strategies.hpp"
