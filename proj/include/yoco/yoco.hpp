#pragma once

// Umbrella header for the whole library.

#include "yoco/augment.hpp"
#include "yoco/dataset.hpp"
#include "yoco/engine.hpp"
#include "yoco/error.hpp"
#include "yoco/image.hpp"
#include "yoco/metrics.hpp"
#include "yoco/mix.hpp"
#include "yoco/pipeline.hpp"
#include "yoco/policy.hpp"
#include "yoco/rng.hpp"
#include "yoco/runner.hpp"
#include "yoco/transforms.hpp"
