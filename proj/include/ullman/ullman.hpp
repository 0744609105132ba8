#pragma once

// Orthographic structure-from-motion for three points and three cameras:
// forward projection, closed-form planar inversion, staged spatial inversion
// through the plane intersection lines, and feasibility classification.

#include "ullman/core.hpp"
#include "ullman/feasibility.hpp"
#include "ullman/forward.hpp"
#include "ullman/oracle.hpp"
#include "ullman/reconstruct2d.hpp"
#include "ullman/reconstruct3d.hpp"
#include "ullman/scene.hpp"
