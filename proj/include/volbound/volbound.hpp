#pragma once

#include "volbound/asymptotics.hpp"
#include "volbound/errors.hpp"
#include "volbound/estimate.hpp"
#include "volbound/experiments.hpp"
#include "volbound/gauss_bs.hpp"
#include "volbound/mc_engine.hpp"
#include "volbound/quadrature.hpp"
#include "volbound/sabr.hpp"
#include "volbound/smile.hpp"
