#pragma once

#include "qsup/defaults.hpp"
#include "qsup/dispersion.hpp"
#include "qsup/errors.hpp"
#include "qsup/interferometer.hpp"
#include "qsup/spdc.hpp"
#include "qsup/spectrum.hpp"
#include "qsup/structfit.hpp"
#include "qsup/sweep.hpp"
#include "qsup/units.hpp"
