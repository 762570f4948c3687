#pragma once

#include "cloning/analytic.hpp"
#include "cloning/cloner.hpp"
#include "cloning/csv.hpp"
#include "cloning/dynamics.hpp"
#include "cloning/hilbert.hpp"
#include "cloning/model.hpp"
#include "cloning/observables.hpp"
#include "cloning/probability_table.hpp"
