#pragma once

// Umbrella header.

#include "wbcomp/certificate.hpp"
#include "wbcomp/comparison.hpp"
#include "wbcomp/equality_models.hpp"
#include "wbcomp/expression.hpp"
#include "wbcomp/extended_real.hpp"
#include "wbcomp/frame.hpp"
#include "wbcomp/instance.hpp"
#include "wbcomp/jet.hpp"
#include "wbcomp/manifold.hpp"
#include "wbcomp/model_functions.hpp"
#include "wbcomp/numerics.hpp"
#include "wbcomp/params.hpp"
#include "wbcomp/profile.hpp"
#include "wbcomp/report.hpp"
#include "wbcomp/scenario.hpp"
#include "wbcomp/spectrum.hpp"
