// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

// Umbrella header for the synthgen library.

#pragma once

#include "synthgen/annotate.hpp"
#include "synthgen/bvh.hpp"
#include "synthgen/camera.hpp"
#include "synthgen/catalog.hpp"
#include "synthgen/config.hpp"
#include "synthgen/errors.hpp"
#include "synthgen/eval.hpp"
#include "synthgen/hdri.hpp"
#include "synthgen/image.hpp"
#include "synthgen/io.hpp"
#include "synthgen/material.hpp"
#include "synthgen/math.hpp"
#include "synthgen/mesh.hpp"
#include "synthgen/mesh_io.hpp"
#include "synthgen/physics.hpp"
#include "synthgen/pipeline.hpp"
#include "synthgen/render.hpp"
#include "synthgen/rng.hpp"
#include "synthgen/sampler.hpp"
#include "synthgen/texture.hpp"
#include "synthgen/version.hpp"
