#pragma once

#include "nl4s/dynamics.hpp"
#include "nl4s/errors.hpp"
#include "nl4s/exact.hpp"
#include "nl4s/field.hpp"
#include "nl4s/field_io.hpp"
#include "nl4s/grid.hpp"
#include "nl4s/regimes.hpp"
#include "nl4s/spectral.hpp"
#include "nl4s/experiments/fit.hpp"
#include "nl4s/experiments/params.hpp"
#include "nl4s/experiments/profiles.hpp"
#include "nl4s/experiments/records.hpp"
#include "nl4s/experiments/rescaling.hpp"
#include "nl4s/experiments/result.hpp"
#include "nl4s/experiments/studies.hpp"
#include "nl4s/experiments/sweep.hpp"
