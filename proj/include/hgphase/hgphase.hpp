// hgphase.hpp: umbrella header

#pragma once

#include "hgphase/core.hpp"
#include "hgphase/errors.hpp"
#include "hgphase/evolution.hpp"
#include "hgphase/frame.hpp"
#include "hgphase/phases.hpp"
#include "hgphase/rotating_model.hpp"
