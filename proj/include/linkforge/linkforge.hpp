#pragma once

#include "geomlink.hpp"
#include "linkalg.hpp"
#include "numeric.hpp"
#include "parallel.hpp"
#include "pipelines.hpp"
#include "selection.hpp"
#include "serialize.hpp"
#include "simplicial.hpp"

namespace linkforge {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace linkforge
