#pragma once

#include "k3lat/arith.hpp"
#include "k3lat/lattice.hpp"
#include "k3lat/isometry.hpp"
#include "k3lat/transport.hpp"
#include "k3lat/extended.hpp"
#include "k3lat/hk_model.hpp"
#include "k3lat/psi_tilde.hpp"
#include "k3lat/criteria.hpp"
#include "k3lat/pipeline.hpp"
#include "k3lat/verify.hpp"
#include "k3lat/json_io.hpp"
