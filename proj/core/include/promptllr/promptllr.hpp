#pragma once

#include "promptllr/baselines.hpp"
#include "promptllr/error.hpp"
#include "promptllr/evidence.hpp"
#include "promptllr/feature_set.hpp"
#include "promptllr/io.hpp"
#include "promptllr/llr.hpp"
#include "promptllr/metrics.hpp"
#include "promptllr/parallel.hpp"
#include "promptllr/prompts.hpp"
#include "promptllr/synthetic.hpp"
#include "promptllr/version.hpp"
