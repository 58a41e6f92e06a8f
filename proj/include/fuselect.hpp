#pragma once

#include "fuselect/types.hpp"
#include "fuselect/uncertainty.hpp"
#include "fuselect/record.hpp"
#include "fuselect/score_file.hpp"
#include "fuselect/artifact_io.hpp"
#include "fuselect/fusion.hpp"
#include "fuselect/calibrator.hpp"
#include "fuselect/metrics.hpp"
#include "fuselect/diagnostics.hpp"
#include "fuselect/synth.hpp"
#include "fuselect/pipeline.hpp"
