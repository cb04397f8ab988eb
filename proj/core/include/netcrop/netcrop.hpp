#pragma once

#include "netcrop/alignment.hpp"
#include "netcrop/cv.hpp"
#include "netcrop/eigensolver.hpp"
#include "netcrop/errors.hpp"
#include "netcrop/estimators.hpp"
#include "netcrop/generators.hpp"
#include "netcrop/graph.hpp"
#include "netcrop/kmeans.hpp"
#include "netcrop/latent_mle.hpp"
#include "netcrop/report.hpp"
#include "netcrop/rng.hpp"
#include "netcrop/selection.hpp"
#include "netcrop/spectral.hpp"
