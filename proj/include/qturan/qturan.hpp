// Umbrella header.
#pragma once

#include "qturan/numeric.hpp"
#include "qturan/interval.hpp"
#include "qturan/series.hpp"
#include "qturan/qfunctions.hpp"
#include "qturan/classical.hpp"
#include "qturan/coefficients.hpp"
#include "qturan/verify.hpp"
#include "qturan/report.hpp"
