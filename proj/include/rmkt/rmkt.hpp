#pragma once

#include <rmkt/aggregate.hpp>
#include <rmkt/csv.hpp>
#include <rmkt/dataset.hpp>
#include <rmkt/dynamics.hpp>
#include <rmkt/error.hpp>
#include <rmkt/evaluate.hpp>
#include <rmkt/lmsr.hpp>
#include <rmkt/report.hpp>
#include <rmkt/special_functions.hpp>
#include <rmkt/stats.hpp>
#include <rmkt/synth.hpp>
#include <rmkt/timestamp.hpp>
