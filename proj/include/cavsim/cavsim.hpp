#pragma once

#include "cavsim/composite.hpp"
#include "cavsim/density.hpp"
#include "cavsim/dilation.hpp"
#include "cavsim/fock.hpp"
#include "cavsim/heisenberg.hpp"
#include "cavsim/integrator.hpp"
#include "cavsim/lindblad.hpp"
#include "cavsim/linalg.hpp"
#include "cavsim/ou.hpp"
#include "cavsim/weyl.hpp"
