#pragma once

// Inexact augmented Lagrangian solver for linearly constrained composite
// convex programs, with certified inner termination (a computable optimality
// gap from one exact LMO call) and a verifier for the non-ergodic rate bounds
// along measured traces.

#include "ial/al.hpp"
#include "ial/composite.hpp"
#include "ial/experiment.hpp"
#include "ial/generate.hpp"
#include "ial/inner.hpp"
#include "ial/io.hpp"
#include "ial/linalg.hpp"
#include "ial/outer.hpp"
#include "ial/prng.hpp"
#include "ial/problem.hpp"
#include "ial/smooth.hpp"
#include "ial/theory.hpp"
#include "ial/types.hpp"
