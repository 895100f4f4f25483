#pragma once

#include "compiler.hpp"
#include "constructions.hpp"
#include "crn.hpp"
#include "crn_json.hpp"
#include "kinetics.hpp"
#include "lemmas.hpp"
#include "netlist.hpp"
#include "ode.hpp"
#include "rng.hpp"
#include "scenarios.hpp"
#include "signal.hpp"
#include "trace_io.hpp"
#include "verification.hpp"
