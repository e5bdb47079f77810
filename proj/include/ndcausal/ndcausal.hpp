#pragma once

#include "ndcausal/term.hpp"
#include "ndcausal/formula.hpp"
#include "ndcausal/printer.hpp"
#include "ndcausal/formula_ops.hpp"
#include "ndcausal/theory.hpp"
#include "ndcausal/oracle.hpp"
#include "ndcausal/validate.hpp"
#include "ndcausal/simplify.hpp"
#include "ndcausal/regression.hpp"
#include "ndcausal/query.hpp"
#include "ndcausal/dsl.hpp"
#include "ndcausal/export.hpp"
#include "ndcausal/generate.hpp"
