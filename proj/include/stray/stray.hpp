#pragma once

// Everything except the CLI, which pulls in CLI11 and nlohmann::json.
#include "stray/baseline.hpp"
#include "stray/core.hpp"
#include "stray/csv.hpp"
#include "stray/detect.hpp"
#include "stray/neighbors.hpp"
#include "stray/normalize.hpp"
#include "stray/rng.hpp"
#include "stray/scoring.hpp"
#include "stray/streaming.hpp"
#include "stray/synth.hpp"
#include "stray/threshold.hpp"
