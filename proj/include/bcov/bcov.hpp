#pragma once

#include "bcov/fgab.hpp"
#include "bcov/finmodel.hpp"
#include "bcov/ktheory.hpp"
#include "bcov/plcover.hpp"
#include "bcov/ratmap.hpp"
