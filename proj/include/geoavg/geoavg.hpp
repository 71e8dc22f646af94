#pragma once

#include "geoavg/errors.hpp"
#include "geoavg/manifold.hpp"
#include "geoavg/so3.hpp"
#include "geoavg/manifolds.hpp"
#include "geoavg/geodesics.hpp"
#include "geoavg/field.hpp"
#include "geoavg/flows.hpp"
#include "geoavg/averaging.hpp"
#include "geoavg/stability.hpp"
#include "geoavg/closeness.hpp"
#include "geoavg/expr.hpp"
#include "geoavg/system.hpp"
#include "geoavg/config.hpp"
#include "geoavg/systems.hpp"
