#pragma once

// Everything in one include.

#include "geoform/core/dot.hpp"
#include "geoform/core/error.hpp"
#include "geoform/core/ids.hpp"
#include "geoform/core/rng.hpp"
#include "geoform/geom/eval.hpp"
#include "geoform/geom/fact.hpp"
#include "geoform/geom/kernel.hpp"
#include "geoform/geom/types.hpp"
#include "geoform/construct/operators.hpp"
#include "geoform/construct/program.hpp"
#include "geoform/construct/realize.hpp"
#include "geoform/construct/sampler.hpp"
#include "geoform/deduce/closure.hpp"
#include "geoform/deduce/dot.hpp"
#include "geoform/deduce/rule.hpp"
#include "geoform/instance/instance.hpp"
#include "geoform/dimension/concepts.hpp"
#include "geoform/dimension/dim_expr.hpp"
#include "geoform/index/declaration.hpp"
#include "geoform/index/index.hpp"
#include "geoform/ground/engine.hpp"
#include "geoform/ground/formula.hpp"
#include "geoform/ground/oracles.hpp"
#include "geoform/ground/scene.hpp"
#include "geoform/ground/statement.hpp"
#include "geoform/ground/types.hpp"
