#pragma once

#include "errors.hpp"
#include "rational.hpp"
#include "skew_matrix.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "twisted_algebra.hpp"
#include "finite_reps.hpp"
#include "grid.hpp"
#include "symplectic.hpp"
#include "moyal.hpp"
#include "weyl.hpp"
#include "spectra.hpp"
#include "io.hpp"
