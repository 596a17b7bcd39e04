#pragma once

/** @file
 * Umbrella header for the weighted ergodic-average toolkit.
 */

#include <birkhoff/averages.hpp>
#include <birkhoff/dictionary.hpp>
#include <birkhoff/dmd.hpp>
#include <birkhoff/edmd.hpp>
#include <birkhoff/errors.hpp>
#include <birkhoff/forecast.hpp>
#include <birkhoff/io/csv.hpp>
#include <birkhoff/linalg.hpp>
#include <birkhoff/series.hpp>
#include <birkhoff/sindy.hpp>
#include <birkhoff/specmeas.hpp>
#include <birkhoff/summation.hpp>
#include <birkhoff/systems.hpp>
