#pragma once

#include "pwsavg/averaged_poly.hpp"
#include "pwsavg/averaging.hpp"
#include "pwsavg/circle_profile.hpp"
#include "pwsavg/errors.hpp"
#include "pwsavg/locus.hpp"
#include "pwsavg/perturbation.hpp"
#include "pwsavg/quadrature.hpp"
#include "pwsavg/realization.hpp"
#include "pwsavg/simulator.hpp"
