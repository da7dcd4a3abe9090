#pragma once

#include "pwvie/error.hpp"
#include "pwvie/rational.hpp"
#include "pwvie/polynomial.hpp"
#include "pwvie/model.hpp"
#include "pwvie/affine.hpp"
#include "pwvie/logpower.hpp"
#include "pwvie/characteristic.hpp"
#include "pwvie/asymptotics.hpp"
#include "pwvie/quadrature.hpp"
#include "pwvie/mesh.hpp"
#include "pwvie/stepsolver.hpp"
#include "pwvie/refinement.hpp"
#include "pwvie/verifier.hpp"
#include "pwvie/io.hpp"
