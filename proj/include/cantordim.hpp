#ifndef CANTORDIM_HPP
#define CANTORDIM_HPP

#include "cantordim/capacity.hpp"
#include "cantordim/config.hpp"
#include "cantordim/conformal.hpp"
#include "cantordim/cylinder_tree.hpp"
#include "cantordim/diagnostics.hpp"
#include "cantordim/dimension.hpp"
#include "cantordim/errors.hpp"
#include "cantordim/fixtures.hpp"
#include "cantordim/geometry.hpp"
#include "cantordim/harmonic.hpp"
#include "cantordim/level_measure.hpp"
#include "cantordim/parallel.hpp"
#include "cantordim/regularizer.hpp"
#include "cantordim/rng.hpp"
#include "cantordim/version.hpp"

#endif  // CANTORDIM_HPP
