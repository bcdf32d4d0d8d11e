#pragma once

#include "statphase/closed_forms.hpp"
#include "statphase/dispersion.hpp"
#include "statphase/error.hpp"
#include "statphase/fields.hpp"
#include "statphase/newton.hpp"
#include "statphase/oracle.hpp"
#include "statphase/stationary_phase.hpp"
#include "statphase/taylor2.hpp"
#include "statphase/trajectory.hpp"
#include "statphase/vec3.hpp"
