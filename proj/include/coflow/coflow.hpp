#pragma once

#include "coflow/assignment.hpp"
#include "coflow/documents.hpp"
#include "coflow/error.hpp"
#include "coflow/generator.hpp"
#include "coflow/metrics.hpp"
#include "coflow/model.hpp"
#include "coflow/pipeline.hpp"
#include "coflow/primal_dual.hpp"
#include "coflow/rng.hpp"
#include "coflow/simulator.hpp"
#include "coflow/trace_io.hpp"
