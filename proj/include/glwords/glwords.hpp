#pragma once

// Exact computations with word maps with constants over GL_n(F_q):
// finite-field linear algebra, word reduction and classification, the
// projective rank seminorm, constructive source-to-target witnesses,
// word-image diameter bounds, exhaustive mixed-identity search on small
// groups, and diagonal-embedding towers.

#include "error.hpp"
#include "prng.hpp"
#include "rational.hpp"
#include "field.hpp"
#include "matrix.hpp"
#include "subspace.hpp"
#include "seminorm.hpp"
#include "word.hpp"
#include "sampling.hpp"
#include "witness.hpp"
#include "image.hpp"
#include "smallgroup.hpp"
#include "tower.hpp"
#include "io.hpp"
#include "cli.hpp"
