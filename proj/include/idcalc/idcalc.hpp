#pragma once

#include "idcalc/core.hpp"
#include "idcalc/factorization.hpp"
#include "idcalc/grid.hpp"
#include "idcalc/levyarea.hpp"
#include "idcalc/mappings.hpp"
#include "idcalc/quadrature.hpp"
#include "idcalc/report.hpp"
#include "idcalc/rng.hpp"
#include "idcalc/simulate.hpp"
#include "idcalc/spec_io.hpp"
#include "idcalc/spectral.hpp"
#include "idcalc/types.hpp"
#include "idcalc/verify.hpp"
