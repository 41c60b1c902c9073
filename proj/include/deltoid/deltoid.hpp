#pragma once

#include "deltoid/exactnum.hpp"
#include "deltoid/geometry.hpp"
#include "deltoid/arrangement.hpp"
#include "deltoid/prototiles.hpp"
#include "deltoid/substitution.hpp"
#include "deltoid/patch.hpp"
#include "deltoid/random.hpp"
#include "deltoid/analysis.hpp"
#include "deltoid/io.hpp"
