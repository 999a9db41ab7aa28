// dsgld.hpp — umbrella header for the decentralized Langevin sampling library.
#pragma once

#include "dsgld/errors.hpp"
#include "dsgld/rng.hpp"
#include "dsgld/linalg.hpp"
#include "dsgld/io.hpp"
#include "dsgld/network.hpp"
#include "dsgld/data.hpp"
#include "dsgld/models.hpp"
#include "dsgld/metrics.hpp"
#include "dsgld/samplers.hpp"
#include "dsgld/theory.hpp"
#include "dsgld/harness.hpp"
#include "dsgld/svg.hpp"
