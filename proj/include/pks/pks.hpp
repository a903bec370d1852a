#pragma once

#include "config.hpp"
#include "density.hpp"
#include "energy.hpp"
#include "errors.hpp"
#include "evolution.hpp"
#include "experiments.hpp"
#include "field.hpp"
#include "geometry.hpp"
#include "interface.hpp"
#include "io.hpp"
#include "nonlinearity.hpp"
#include "state.hpp"
#include "vpmcf.hpp"
