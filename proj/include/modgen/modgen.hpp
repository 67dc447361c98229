#pragma once

// Umbrella header for the full library: language front end, interpreter,
// test-case model, genetic search, and benchmark harness.

#include "modgen/ast.hpp"
#include "modgen/bench.hpp"
#include "modgen/cluster.hpp"
#include "modgen/corpus.hpp"
#include "modgen/genops.hpp"
#include "modgen/interp.hpp"
#include "modgen/lexer.hpp"
#include "modgen/parser.hpp"
#include "modgen/printer.hpp"
#include "modgen/report.hpp"
#include "modgen/rng.hpp"
#include "modgen/search.hpp"
#include "modgen/testcase.hpp"
#include "modgen/trace.hpp"
#include "modgen/typecheck.hpp"
#include "modgen/values.hpp"
