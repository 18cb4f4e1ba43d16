#pragma once

#include "circuit.hpp"
#include "encoder_cltl.hpp"
#include "encoder_continuous.hpp"
#include "encoder_robust.hpp"
#include "encoder_sync.hpp"
#include "encoding.hpp"
#include "error.hpp"
#include "formula.hpp"
#include "ilp.hpp"
#include "oracle.hpp"
#include "solver.hpp"
#include "system.hpp"
