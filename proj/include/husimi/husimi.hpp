#pragma once

#include "husimi/errors.hpp"
#include "husimi/quadrature.hpp"
#include "husimi/fock_core.hpp"
#include "husimi/operator_polynomial.hpp"
#include "husimi/husimi_transform.hpp"
#include "husimi/reconstruction.hpp"
#include "husimi/error_analysis.hpp"
#include "husimi/nnls.hpp"
#include "husimi/fock_demo.hpp"
#include "husimi/job_config.hpp"
#include "husimi/grid_csv.hpp"
