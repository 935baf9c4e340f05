#pragma once

#include "qiopa/config.hpp"
#include "qiopa/constants.hpp"
#include "qiopa/detection.hpp"
#include "qiopa/dynamics.hpp"
#include "qiopa/errors.hpp"
#include "qiopa/gaussian.hpp"
#include "qiopa/numerics.hpp"
#include "qiopa/params.hpp"
#include "qiopa/spectra.hpp"
#include "qiopa/sweep.hpp"
