#pragma once
// Umbrella header for the annotation-consistency audit library.

#include "labelaudit/audit.hpp"
#include "labelaudit/classifiers.hpp"
#include "labelaudit/common.hpp"
#include "labelaudit/corpus.hpp"
#include "labelaudit/csv.hpp"
#include "labelaudit/ensemble.hpp"
#include "labelaudit/pipeline.hpp"
#include "labelaudit/search.hpp"
#include "labelaudit/synth.hpp"
#include "labelaudit/textproc.hpp"
#include "labelaudit/unicode.hpp"
