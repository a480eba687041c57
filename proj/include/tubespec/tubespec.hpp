// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tubespec authors

#pragma once

#include "tubespec/errors.hpp"
#include "tubespec/lattice_geometry.hpp"
#include "tubespec/mode_potentials.hpp"
#include "tubespec/sturm_solver.hpp"
#include "tubespec/tube_spectrum.hpp"
#include "tubespec/lanczos.hpp"
#include "tubespec/grid_oracle.hpp"
#include "tubespec/deformation_scan.hpp"
