#pragma once

#include "projcell/core.hpp"
#include "projcell/word.hpp"
#include "projcell/hull.hpp"
#include "projcell/cone.hpp"
#include "projcell/group.hpp"
#include "projcell/decomp.hpp"
#include "projcell/deform.hpp"
#include "projcell/io.hpp"
#include "projcell/svg.hpp"
